#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace polyakgrad {

// One row of the training metrics CSV. Fields that do not apply to a given
// method or iteration hold NaN.
struct MetricsRow {
  std::string method;
  std::uint64_t seed;
  int iter;
  double l_hat_1;
  double l_hat_2;
  double gap;
  double gamma;
  bool capped;
  double grad_sq_norm;
  int updated_model;
  double eval_return;
  double wall_time;
};

inline constexpr const char* kMetricsHeader =
    "method,seed,iter,l_hat_1,l_hat_2,gap,gamma,capped,grad_sq_norm,"
    "updated_model,eval_return,wall_time";

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_metrics_csv(const std::string& path);

// Trailing mean over min(window, t+1) points at index t.
std::vector<double> moving_average(std::span<const double> series, int window);

}  // namespace polyakgrad
