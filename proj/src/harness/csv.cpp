#include "sgps/harness/csv.hpp"

#include <ostream>

namespace sgps::harness {

const std::string& summary_csv_header() {
  static const std::string header =
      "sweep,repeat,alpha,eta,sigma_hat_scale,probes,substeps,sure_repeats,sure_enabled,status,"
      "final_psnr,final_mse,total_nfe,mean_sigma_hat,skipped_steps,error";
  return header;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << summary_csv_header() << '\n';
  for (const auto& r : rows) {
    out << r.sweep_index << ',' << r.repeat << ',' << format_number(r.alpha) << ',' << format_number(r.eta) << ','
        << format_number(r.sigma_hat_scale) << ',' << r.probes << ',' << r.substeps << ',' << r.sure_repeats << ','
        << (r.sure_enabled ? 1 : 0) << ',' << r.status << ',' << format_number(r.final.psnr) << ','
        << format_number(r.final.mse) << ',' << r.final.total_nfe << ',' << format_number(r.mean_sigma_hat) << ','
        << r.skipped_steps << ',' << csv_escape(r.error) << '\n';
  }
}

const std::string& influx_csv_header() {
  static const std::string header =
      "step,sigma_t,sigma_hat_with,sigma_hat_without,psnr_x0t,psnr_x0ty,psnr_star_with,psnr_x0ty_without";
  return header;
}

void write_influx_csv(std::ostream& out, const std::vector<InfluxRow>& rows) {
  out << influx_csv_header() << '\n';
  for (const auto& r : rows) {
    out << r.step << ',' << format_number(r.sigma_t) << ',' << format_number(r.sigma_hat_with) << ','
        << format_number(r.sigma_hat_without) << ',' << format_number(r.psnr_x0t) << ','
        << format_number(r.psnr_x0ty) << ',' << format_number(r.psnr_star_with) << ','
        << format_number(r.psnr_x0ty_without) << '\n';
  }
}

}  // namespace sgps::harness
