#include "sgps/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace sgps {

std::size_t RunReport::summed_step_nfe() const {
  std::size_t total = 0;
  for (const auto& s : steps) total += s.nfe;
  return total;
}

const std::string& step_csv_header() {
  static const std::string header =
      "step,sigma_t,sigma_hat_raw,sigma_hat_used,sure_value,psnr_x0t,psnr_x0ty,psnr_star,nfe_step";
  return header;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

void write_step_csv(std::ostream& out, const RunReport& report) {
  out << step_csv_header() << '\n';
  for (const auto& s : report.steps) {
    out << s.step << ',' << format_number(s.sigma_t) << ',' << format_number(s.sigma_hat_raw) << ','
        << format_number(s.sigma_hat_used) << ',' << format_number(s.sure_value) << ','
        << format_number(s.psnr_x0t) << ',' << format_number(s.psnr_x0ty) << ','
        << format_number(s.psnr_star) << ',' << s.nfe << '\n';
  }
}

}  // namespace sgps
