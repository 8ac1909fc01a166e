#include "sgps/harness/experiment_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/json_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sgps/error.hpp"

namespace sgps::harness {

namespace pt = boost::property_tree;

std::size_t SweepAxes::size() const {
  std::size_t n = 1;
  for (std::size_t len : {alpha.size(), eta.size(), sigma_hat_scale.size(), probes.size(), substeps.size(),
                          sure_repeats.size()}) {
    if (len > 0) n *= len;
  }
  return n;
}

bool SweepAxes::any() const {
  return !alpha.empty() || !eta.empty() || !sigma_hat_scale.empty() || !probes.empty() || !substeps.empty() ||
         !sure_repeats.empty();
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(field, "expected a number, got '" + text + "'");
  }
  return value;
}

std::uint64_t parse_unsigned(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(field, "expected a non-negative integer, got '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& field, const std::string& text) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(field, "expected true or false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (char c : text) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else {
      item += c;
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

// A list is either a comma/space separated string or, in JSON, an array.
std::vector<std::string> list_items(const pt::ptree& node) {
  if (!node.empty()) {
    std::vector<std::string> out;
    for (const auto& [key, child] : node) out.push_back(child.data());
    return out;
  }
  return split_list(node.data());
}

std::vector<double> parse_double_list(const std::string& field, const pt::ptree& node) {
  std::vector<double> out;
  for (const auto& item : list_items(node)) out.push_back(parse_double(field, item));
  if (out.empty()) throw ConfigError(field, "list must not be empty");
  return out;
}

std::vector<std::size_t> parse_count_list(const std::string& field, const pt::ptree& node) {
  std::vector<std::size_t> out;
  for (const auto& item : list_items(node)) out.push_back(parse_unsigned(field, item));
  if (out.empty()) throw ConfigError(field, "list must not be empty");
  return out;
}

OpKind parse_op(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  for (OpKind k : {OpKind::identity, OpKind::mask, OpKind::blur, OpKind::downsample, OpKind::magnitude_dft,
                   OpKind::range_clip}) {
    if (to_string(k) == t) return k;
  }
  throw ConfigError(field, "unknown operator '" + text + "'");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Handler = std::function<void(const std::string& field, const pt::ptree& node)>;

class Parser {
 public:
  explicit Parser(ExperimentConfig& cfg) : cfg_(cfg) { register_keys(); }

  void run(const pt::ptree& root) {
    for (const auto& [section, body] : root) {
      if (body.empty() && !body.data().empty()) {
        throw ConfigError(section, "top-level keys must live inside a section");
      }
      for (const auto& [key, node] : body) {
        const std::string field = section + "." + key;
        const auto it = handlers_.find(field);
        if (it == handlers_.end()) throw ConfigError(field, "unknown key");
        it->second(field, node);
      }
    }
    if (!sigma_y_set_) cfg_.sampler.sigma_y = cfg_.task.noise_sigma;
  }

 private:
  void on(const std::string& field, Handler h) { handlers_.emplace(field, std::move(h)); }

  void real(const std::string& field, double& target) {
    on(field, [&target](const std::string& f, const pt::ptree& n) { target = parse_double(f, n.data()); });
  }
  void count(const std::string& field, std::size_t& target) {
    on(field, [&target](const std::string& f, const pt::ptree& n) {
      target = static_cast<std::size_t>(parse_unsigned(f, n.data()));
    });
  }
  void u64(const std::string& field, std::uint64_t& target) {
    on(field, [&target](const std::string& f, const pt::ptree& n) { target = parse_unsigned(f, n.data()); });
  }
  void flag(const std::string& field, bool& target) {
    on(field, [&target](const std::string& f, const pt::ptree& n) { target = parse_bool(f, n.data()); });
  }
  void text(const std::string& field, std::string& target) {
    on(field, [&target](const std::string&, const pt::ptree& n) { target = trim(n.data()); });
  }

  void register_keys() {
    auto& c = cfg_;
    u64("experiment.seed", c.seed);
    count("experiment.repeats", c.repeats);
    text("experiment.output_dir", c.output_dir);
    count("experiment.sweep_cap", c.sweep_cap);

    auto& t = c.task;
    on("task.operator", [&t](const std::string& f, const pt::ptree& n) { t.op = parse_op(f, n.data()); });
    on("task.shape", [&t](const std::string& f, const pt::ptree& n) {
      try {
        t.shape = Shape::parse(trim(n.data()));
      } catch (const Error& e) {
        throw ConfigError(f, e.what());
      }
    });
    count("task.kernel_size", t.kernel_size);
    real("task.kernel_std", t.kernel_std);
    text("task.kernel_file", t.kernel_file);
    real("task.mask_keep", t.mask_keep);
    u64("task.mask_seed", t.mask_seed);
    count("task.factor", t.factor);
    real("task.oversample", t.oversample);
    real("task.threshold", t.threshold);
    on("task.clip_mode", [&t](const std::string& f, const pt::ptree& n) {
      const std::string v = trim(n.data());
      if (v == "hard") t.clip_mode = ClipMode::hard;
      else if (v == "soft") t.clip_mode = ClipMode::soft;
      else throw ConfigError(f, "expected hard or soft");
    });
    real("task.noise_sigma", t.noise_sigma);
    text("task.ground_truth", t.ground_truth);

    auto& p = c.prior;
    text("prior.kind", p.kind);
    count("prior.components", p.components);
    real("prior.variance", p.variance);
    real("prior.amplitude", p.amplitude);
    real("prior.mean", p.mean);
    text("prior.means_file", p.means_file);
    on("prior.weights", [&p](const std::string& f, const pt::ptree& n) { p.weights = parse_double_list(f, n); });
    u64("prior.seed", p.seed);
    real("prior.perturbation_amplitude", p.perturbation_amplitude);
    real("prior.perturbation_frequency", p.perturbation_frequency);

    auto& s = c.sampler;
    count("sampler.steps", s.steps);
    real("sampler.alpha", s.alpha);
    real("sampler.epsilon_divisor", s.epsilon_divisor);
    count("sampler.langevin_steps", s.langevin_steps);
    on("sampler.langevin_eta", [&s](const std::string& f, const pt::ptree& n) {
      s.langevin_eta = parse_double(f, n.data());
    });
    real("sampler.lipschitz_scale", s.lipschitz_scale);
    on("sampler.sigma_y", [this, &s](const std::string& f, const pt::ptree& n) {
      s.sigma_y = parse_double(f, n.data());
      sigma_y_set_ = true;
    });
    real("sampler.rho", s.rho);
    real("sampler.t_min", s.t_min);
    on("sampler.t_max", [&s](const std::string& f, const pt::ptree& n) { s.t_max = parse_double(f, n.data()); });
    flag("sampler.sure_enabled", s.sure_enabled);
    count("sampler.sure_repeats", s.sure_repeats);
    count("sampler.mc_probes", s.mc_probes);
    count("sampler.ode_substeps", s.ode_substeps);
    real("sampler.sigma_floor", s.sigma_floor);
    real("sampler.sigma_hat_scale", s.sigma_hat_scale);
    real("sampler.psnr_peak", s.psnr_peak);
    flag("sampler.trace_noise_levels", s.trace_noise_levels);
    count("sampler.patch_size", s.patch.patch_size);
    count("sampler.patch_stride", s.patch.stride);
    real("sampler.patch_tolerance", s.patch.tolerance);

    auto& w = c.sweep;
    on("sweep.alpha", [&w](const std::string& f, const pt::ptree& n) { w.alpha = parse_double_list(f, n); });
    on("sweep.eta", [&w](const std::string& f, const pt::ptree& n) { w.eta = parse_double_list(f, n); });
    on("sweep.sigma_hat_scale",
       [&w](const std::string& f, const pt::ptree& n) { w.sigma_hat_scale = parse_double_list(f, n); });
    on("sweep.probes", [&w](const std::string& f, const pt::ptree& n) { w.probes = parse_count_list(f, n); });
    on("sweep.substeps", [&w](const std::string& f, const pt::ptree& n) { w.substeps = parse_count_list(f, n); });
    on("sweep.sure_repeats",
       [&w](const std::string& f, const pt::ptree& n) { w.sure_repeats = parse_count_list(f, n); });
  }

  ExperimentConfig& cfg_;
  std::map<std::string, Handler> handlers_;
  bool sigma_y_set_ = false;
};

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

void validate(const ExperimentConfig& c) {
  require(c.repeats >= 1, "experiment.repeats", "must be >= 1");
  require(c.sweep_cap >= 1, "experiment.sweep_cap", "must be >= 1");
  require(c.sweep.size() <= c.sweep_cap, "sweep",
          "cartesian size " + std::to_string(c.sweep.size()) + " exceeds sweep_cap " + std::to_string(c.sweep_cap));
  const auto& t = c.task;
  require(t.shape.has_value() || t.ground_truth != "prior", "task.shape", "required unless ground_truth is a file");
  if (t.shape) require(t.shape->numel() > 0, "task.shape", "must be non-empty");
  require(t.noise_sigma >= 0.0 && std::isfinite(t.noise_sigma), "task.noise_sigma", "must be >= 0");
  require(t.kernel_size >= 1, "task.kernel_size", "must be >= 1");
  require(t.kernel_std > 0.0, "task.kernel_std", "must be > 0");
  require(t.mask_keep > 0.0 && t.mask_keep <= 1.0, "task.mask_keep", "must be in (0, 1]");
  require(t.factor >= 1, "task.factor", "must be >= 1");
  require(t.oversample >= 1.0, "task.oversample", "must be >= 1");
  require(t.threshold > 0.0, "task.threshold", "must be > 0");

  const auto& p = c.prior;
  require(p.kind == "gaussian" || p.kind == "mixture" || p.kind == "smooth_mixture", "prior.kind",
          "expected gaussian, mixture or smooth_mixture");
  require(p.variance > 0.0 && std::isfinite(p.variance), "prior.variance", "must be > 0");
  require(p.components >= 1, "prior.components", "must be >= 1");
  require(p.kind != "mixture" || !p.means_file.empty(), "prior.means_file", "required for kind = mixture");
  for (double w : p.weights) require(w > 0.0, "prior.weights", "must be > 0");
  require(p.perturbation_amplitude >= 0.0, "prior.perturbation_amplitude", "must be >= 0");

  c.sampler.validate();
  if (t.shape) {
    const std::size_t smallest = t.shape->is_grid() ? std::min(t.shape->rows(), t.shape->cols()) : t.shape->rows();
    require(c.sampler.patch.patch_size <= smallest, "sampler.patch_size",
            "larger than the signal (" + t.shape->to_string() + ")");
  }
  for (double a : c.sweep.alpha) require(a >= 0.0, "sweep.alpha", "values must be >= 0");
  for (double e : c.sweep.eta) require(e > 0.0, "sweep.eta", "values must be > 0");
  for (double s : c.sweep.sigma_hat_scale) require(s > 0.0, "sweep.sigma_hat_scale", "values must be > 0");
  for (auto v : c.sweep.probes) require(v >= 1, "sweep.probes", "values must be >= 1");
  for (auto v : c.sweep.substeps) require(v >= 1, "sweep.substeps", "values must be >= 1");
  for (auto v : c.sweep.sure_repeats) require(v >= 1, "sweep.sure_repeats", "values must be >= 1");
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) out += fmt_double(values[i]);
    else out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

std::string ExperimentConfig::canonical() const {
  std::ostringstream o;
  o << "experiment.seed=" << seed << '\n'
    << "experiment.repeats=" << repeats << '\n'
    << "experiment.sweep_cap=" << sweep_cap << '\n';
  o << "task.operator=" << to_string(task.op) << '\n'
    << "task.shape=" << (task.shape ? task.shape->to_string() : "") << '\n'
    << "task.kernel_size=" << task.kernel_size << '\n'
    << "task.kernel_std=" << fmt_double(task.kernel_std) << '\n'
    << "task.kernel_file=" << task.kernel_file << '\n'
    << "task.mask_keep=" << fmt_double(task.mask_keep) << '\n'
    << "task.mask_seed=" << task.mask_seed << '\n'
    << "task.factor=" << task.factor << '\n'
    << "task.oversample=" << fmt_double(task.oversample) << '\n'
    << "task.threshold=" << fmt_double(task.threshold) << '\n'
    << "task.clip_mode=" << (task.clip_mode == ClipMode::hard ? "hard" : "soft") << '\n'
    << "task.noise_sigma=" << fmt_double(task.noise_sigma) << '\n'
    << "task.ground_truth=" << task.ground_truth << '\n';
  o << "prior.kind=" << prior.kind << '\n'
    << "prior.components=" << prior.components << '\n'
    << "prior.variance=" << fmt_double(prior.variance) << '\n'
    << "prior.amplitude=" << fmt_double(prior.amplitude) << '\n'
    << "prior.mean=" << fmt_double(prior.mean) << '\n'
    << "prior.means_file=" << prior.means_file << '\n'
    << "prior.weights=" << join(prior.weights) << '\n'
    << "prior.seed=" << prior.seed << '\n'
    << "prior.perturbation_amplitude=" << fmt_double(prior.perturbation_amplitude) << '\n'
    << "prior.perturbation_frequency=" << fmt_double(prior.perturbation_frequency) << '\n';
  const auto& s = sampler;
  o << "sampler.steps=" << s.steps << '\n'
    << "sampler.alpha=" << fmt_double(s.alpha) << '\n'
    << "sampler.epsilon_divisor=" << fmt_double(s.epsilon_divisor) << '\n'
    << "sampler.langevin_steps=" << s.langevin_steps << '\n'
    << "sampler.langevin_eta=" << (s.langevin_eta ? fmt_double(*s.langevin_eta) : "") << '\n'
    << "sampler.lipschitz_scale=" << fmt_double(s.lipschitz_scale) << '\n'
    << "sampler.sigma_y=" << fmt_double(s.sigma_y) << '\n'
    << "sampler.rho=" << fmt_double(s.rho) << '\n'
    << "sampler.t_min=" << fmt_double(s.t_min) << '\n'
    << "sampler.t_max=" << fmt_double(s.resolved_t_max()) << '\n'
    << "sampler.sure_enabled=" << s.sure_enabled << '\n'
    << "sampler.sure_repeats=" << s.sure_repeats << '\n'
    << "sampler.mc_probes=" << s.mc_probes << '\n'
    << "sampler.ode_substeps=" << s.ode_substeps << '\n'
    << "sampler.sigma_floor=" << fmt_double(s.sigma_floor) << '\n'
    << "sampler.sigma_hat_scale=" << fmt_double(s.sigma_hat_scale) << '\n'
    << "sampler.psnr_peak=" << fmt_double(s.psnr_peak) << '\n'
    << "sampler.trace_noise_levels=" << s.trace_noise_levels << '\n'
    << "sampler.patch_size=" << s.patch.patch_size << '\n'
    << "sampler.patch_stride=" << s.patch.stride << '\n'
    << "sampler.patch_tolerance=" << fmt_double(s.patch.tolerance) << '\n';
  o << "sweep.alpha=" << join(sweep.alpha) << '\n'
    << "sweep.eta=" << join(sweep.eta) << '\n'
    << "sweep.sigma_hat_scale=" << join(sweep.sigma_hat_scale) << '\n'
    << "sweep.probes=" << join(sweep.probes) << '\n'
    << "sweep.substeps=" << join(sweep.substeps) << '\n'
    << "sweep.sure_repeats=" << join(sweep.sure_repeats) << '\n';
  return o.str();
}

std::uint64_t ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ExperimentConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

ExperimentConfig parse_experiment_config(const std::string& text, ConfigFormat format) {
  pt::ptree root;
  std::istringstream in(text);
  try {
    if (format == ConfigFormat::json) pt::read_json(in, root);
    else pt::read_ini(in, root);
  } catch (const pt::file_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), e.message());
  }
  ExperimentConfig cfg;
  Parser(cfg).run(root);
  validate(cfg);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  return parse_experiment_config(buffer.str(), json ? ConfigFormat::json : ConfigFormat::ini);
}

}  // namespace sgps::harness
