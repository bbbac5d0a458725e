#include "polyakgrad/metrics.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace polyakgrad {

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRow>& rows) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_metrics_csv: cannot open " + path);
  }
  out.precision(17);
  out << kMetricsHeader << '\n';
  for (const MetricsRow& r : rows) {
    out << r.method << ',' << r.seed << ',' << r.iter << ',' << r.l_hat_1
        << ',' << r.l_hat_2 << ',' << r.gap << ',' << r.gamma << ','
        << (r.capped ? 1 : 0) << ',' << r.grad_sq_norm << ','
        << r.updated_model << ',' << r.eval_return << ',' << r.wall_time
        << '\n';
  }
}

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_metrics_csv: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw std::runtime_error("read_metrics_csv: bad header in " + path);
  }
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) {
      fields.push_back(field);
    }
    if (fields.size() != 12) {
      throw std::runtime_error("read_metrics_csv: bad row in " + path);
    }
    MetricsRow r;
    r.method = fields[0];
    r.seed = std::stoull(fields[1]);
    r.iter = std::stoi(fields[2]);
    r.l_hat_1 = std::stod(fields[3]);
    r.l_hat_2 = std::stod(fields[4]);
    r.gap = std::stod(fields[5]);
    r.gamma = std::stod(fields[6]);
    r.capped = std::stoi(fields[7]) != 0;
    r.grad_sq_norm = std::stod(fields[8]);
    r.updated_model = std::stoi(fields[9]);
    r.eval_return = std::stod(fields[10]);
    r.wall_time = std::stod(fields[11]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<double> moving_average(std::span<const double> series, int window) {
  if (window < 1) {
    throw std::invalid_argument("moving_average: window must be >= 1");
  }
  std::vector<double> out(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    std::size_t lo = t + 1 >= static_cast<std::size_t>(window)
                         ? t + 1 - static_cast<std::size_t>(window)
                         : 0;
    double sum = 0.0;
    for (std::size_t k = lo; k <= t; ++k) {
      sum += series[k];
    }
    out[t] = sum / static_cast<double>(t - lo + 1);
  }
  return out;
}

}  // namespace polyakgrad
