#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ddt/domain.hpp"

namespace ddt {

// Black-box model being distilled. Implementations must be deterministic and
// safe to call from several threads at once.
class Teacher {
 public:
  virtual ~Teacher() = default;

  // One response per row, in order. Continuous responses are reals;
  // categorical responses are class codes of response_kind().classes.
  virtual std::vector<double> evaluate(const RowMatrix& rows) const = 0;
  virtual const ResponseKind& response_kind() const = 0;
  virtual std::string descriptor() const = 0;
};

using TeacherPtr = std::shared_ptr<const Teacher>;

// Calls the teacher and checks its answer: one finite value per row, class
// codes in range. Violations raise TeacherError.
std::vector<double> predict_batch(const Teacher& teacher, const RowMatrix& rows);

// Teacher defined by a per-row function.
class FunctionTeacher : public Teacher {
 public:
  using Fn = std::function<double(std::span<const double>)>;
  FunctionTeacher(Fn fn, ResponseKind kind, std::string descriptor);

  std::vector<double> evaluate(const RowMatrix& rows) const override;
  const ResponseKind& response_kind() const override { return kind_; }
  std::string descriptor() const override { return descriptor_; }

 private:
  Fn fn_;
  ResponseKind kind_;
  std::string descriptor_;
};

// Schema of a single continuous covariate on [a, b] with a continuous response.
CovariateSchema unary_schema(double a, double b, const std::string& name = "x");

// left for x < cut, right otherwise. Requires a < cut < b.
TeacherPtr make_step_teacher(double a, double b, double cut, double left, double right);

// values[k] on [breaks[k-1], breaks[k]) with implicit outer bounds a and b.
// values.size() == breaks.size() + 1, breaks strictly increasing inside (a, b).
TeacherPtr make_piecewise_teacher(double a, double b, std::vector<double> breaks, std::vector<double> values);

// `low` below c and `high` above d. On [c, d] the teacher follows the ramp
// for which the two-sided squared loss of a cut is identical at every
// t in [c, d], so the optimal cut is not unique anywhere in [c, d].
TeacherPtr make_plateau_teacher(double a, double b, double c, double d, double low, double high);

// Nearest grid row on min-max normalised continuous coordinates; categorical
// coordinates must match exactly (mismatches are ranked after all matches).
// Distance ties go to the lexicographically smallest grid row.
TeacherPtr make_grid_teacher(const CovariateSchema& schema, const Dataset& grid);

struct ExternalTeacherOptions {
  std::chrono::milliseconds timeout{60000};
};

// Child process speaking the line protocol: it prints "DDT-TEACHER 1" once,
// then answers each "PREDICT n p" request (followed by n CSV rows) with n
// lines. The command runs through /bin/sh -c.
class ExternalTeacher : public Teacher {
 public:
  ExternalTeacher(std::string command, CovariateSchema schema, ExternalTeacherOptions options = {});
  ~ExternalTeacher() override;
  ExternalTeacher(const ExternalTeacher&) = delete;
  ExternalTeacher& operator=(const ExternalTeacher&) = delete;

  std::vector<double> evaluate(const RowMatrix& rows) const override;
  const ResponseKind& response_kind() const override;
  std::string descriptor() const override;
  // Completed request/response round trips.
  std::size_t exchange_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::shared_ptr<ExternalTeacher> connect_external_teacher(const std::string& command, const CovariateSchema& schema,
                                                          ExternalTeacherOptions options = {});

}  // namespace ddt
