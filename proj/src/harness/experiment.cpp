#include "sgps/harness/experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sgps/error.hpp"
#include "sgps/harness/pgm.hpp"
#include "sgps/harness/svg.hpp"

namespace sgps::harness {
namespace {

enum RepeatStream : std::uint64_t { kTruth = 1, kNoise = 2, kSampler = 3 };

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << contents;
  if (!out) throw Error("failed writing " + path);
}

double finite_mean(const std::vector<double>& values) {
  double total = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    total += v;
    ++n;
  }
  return n ? total / static_cast<double>(n) : kNotMeasured;
}

}  // namespace

GmmPrior smooth_mixture_prior(const Shape& shape, std::size_t components, double variance, double amplitude,
                              std::uint64_t seed) {
  if (components == 0) throw ArgumentError("smooth mixture needs at least one component");
  RngStream rng(seed, 0x5eed);
  const std::size_t rows = shape.rows();
  const std::size_t cols = shape.cols();
  std::vector<Signal> means;
  for (std::size_t k = 0; k < components; ++k) {
    double fr[3], fc[3], phase[3], weight[3];
    for (int j = 0; j < 3; ++j) {
      fr[j] = std::floor(rng.uniform() * 4.0);
      fc[j] = shape.is_grid() ? std::floor(rng.uniform() * 4.0) : 0.0;
      phase[j] = 2.0 * std::numbers::pi * rng.uniform();
      weight[j] = rng.normal() / std::sqrt(3.0);
    }
    Signal m(shape);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        double v = 0.5;
        for (int j = 0; j < 3; ++j) {
          const double arg = fr[j] * static_cast<double>(r) / static_cast<double>(rows) +
                             fc[j] * static_cast<double>(c) / static_cast<double>(cols);
          v += amplitude * weight[j] * std::cos(2.0 * std::numbers::pi * arg + phase[j]);
        }
        m[r * cols + c] = v;
      }
    }
    means.push_back(std::move(m));
  }
  return GmmPrior(std::vector<double>(components, 1.0), std::move(means), variance);
}

Signal smooth_image(std::size_t rows, std::size_t cols) {
  Signal img(Shape::grid(rows, cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double u = static_cast<double>(r) / static_cast<double>(rows);
      const double v = static_cast<double>(c) / static_cast<double>(cols);
      img.at(r, c) = 0.5 + 0.1 * (u - 0.5) + 0.05 * (v - 0.5) +
                     0.1 * std::cos(2.0 * std::numbers::pi * (2.0 * u + v));
    }
  }
  return img;
}

Signal synth_image(std::size_t rows, std::size_t cols, double sigma, RngStream& rng) {
  if (!(sigma >= 0.0)) throw ArgumentError("synth sigma must be >= 0");
  Signal img = smooth_image(rows, cols);
  if (sigma > 0.0) {
    Signal noise = gaussian_like(rng, img.shape());
    axpy(sigma, noise, img);
  }
  return img;
}

std::vector<std::vector<double>> read_number_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::vector<double> row;
    std::string token;
    while (fields >> token) {
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0' || !std::isfinite(v)) {
        throw Error(path + ":" + std::to_string(line_no) + ": not a number '" + token + "'");
      }
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

Task build_task(const ExperimentConfig& cfg) {
  const TaskSpec& spec = cfg.task;
  Task task;
  task.noise_sigma = spec.noise_sigma;
  if (spec.ground_truth != "prior") {
    task.fixed_truth = read_pgm(spec.ground_truth);
    if (spec.shape && *spec.shape != task.fixed_truth->shape()) {
      throw ConfigError("task.shape", "does not match ground truth image " + task.fixed_truth->shape().to_string());
    }
    task.shape = task.fixed_truth->shape();
  } else {
    task.shape = *spec.shape;
  }

  const PriorSpec& ps = cfg.prior;
  if (ps.kind == "gaussian") {
    task.prior = GmmPrior::gaussian(Signal::filled(task.shape, ps.mean), ps.variance);
  } else if (ps.kind == "smooth_mixture") {
    task.prior = smooth_mixture_prior(task.shape, ps.components, ps.variance, ps.amplitude, ps.seed);
  } else {
    const auto rows = read_number_rows(ps.means_file);
    std::vector<Signal> means;
    for (const auto& row : rows) {
      if (row.size() != task.shape.numel()) {
        throw ConfigError("prior.means_file", "mean has " + std::to_string(row.size()) + " values, expected " +
                                                  std::to_string(task.shape.numel()));
      }
      means.emplace_back(task.shape, row);
    }
    if (means.empty()) throw ConfigError("prior.means_file", "no means found");
    std::vector<double> weights = ps.weights;
    if (weights.empty()) weights.assign(means.size(), 1.0);
    if (weights.size() != means.size()) throw ConfigError("prior.weights", "need one weight per mean");
    task.prior = GmmPrior(std::move(weights), std::move(means), ps.variance);
  }

  std::shared_ptr<const Denoiser> den = std::make_shared<GmmDenoiser>(*task.prior);
  if (ps.perturbation_amplitude > 0.0) {
    den = std::make_shared<PerturbedDenoiser>(den, ps.perturbation_amplitude, ps.perturbation_frequency, ps.seed);
  }
  task.denoiser = std::move(den);

  try {
    switch (spec.op) {
      case OpKind::identity:
        task.op = make_identity(task.shape);
        break;
      case OpKind::mask: {
        RngStream rng(spec.mask_seed, 0x3a5c);
        task.op = make_random_mask(task.shape, spec.mask_keep, rng);
        break;
      }
      case OpKind::blur: {
        Signal kernel;
        if (!spec.kernel_file.empty()) {
          std::vector<double> taps;
          for (const auto& row : read_number_rows(spec.kernel_file)) taps.insert(taps.end(), row.begin(), row.end());
          const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(taps.size()))));
          if (task.shape.is_grid()) {
            if (side * side != taps.size()) throw ConfigError("task.kernel_file", "2D kernel must be square");
            kernel = Signal(Shape::grid(side, side), std::move(taps));
          } else {
            kernel = Signal::vector(std::move(taps));
          }
        } else {
          kernel = gaussian_kernel(spec.kernel_size, spec.kernel_std, task.shape.is_grid());
        }
        task.op = make_blur(task.shape, std::move(kernel));
        break;
      }
      case OpKind::downsample:
        task.op = make_downsample(task.shape, spec.factor);
        break;
      case OpKind::magnitude_dft:
        task.op = make_magnitude_dft(task.shape, spec.oversample);
        break;
      case OpKind::range_clip:
        task.op = make_range_clip(task.shape, spec.threshold, spec.clip_mode);
        break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("task", e.what());
  }
  return task;
}

Instance draw_instance(const ExperimentConfig& cfg, const Task& task, std::size_t repeat) {
  const RngStream root(cfg.seed, repeat);
  Instance inst;
  if (task.fixed_truth) {
    inst.x0 = *task.fixed_truth;
  } else {
    RngStream truth = root.split(kTruth);
    inst.x0 = task.prior->sample(truth);
  }
  inst.y = task.op->apply(inst.x0);
  if (task.noise_sigma > 0.0) {
    RngStream noise = root.split(kNoise);
    axpy(task.noise_sigma, gaussian_like(noise, inst.y.shape()), inst.y);
  }
  return inst;
}

RngStream run_stream(const ExperimentConfig& cfg, std::size_t repeat) {
  return RngStream(cfg.seed, repeat).split(kSampler);
}

std::vector<SweepPoint> expand_sweep(const ExperimentConfig& cfg) {
  const SweepAxes& ax = cfg.sweep;
  auto len = [](std::size_t n) { return n ? n : std::size_t{1}; };
  const std::size_t dims[6] = {len(ax.alpha.size()),           len(ax.eta.size()),
                               len(ax.sigma_hat_scale.size()), len(ax.probes.size()),
                               len(ax.substeps.size()),        len(ax.sure_repeats.size())};
  std::vector<SweepPoint> points;
  const std::size_t total = ax.size();
  points.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t digit[6];
    std::size_t rest = idx;
    for (int d = 5; d >= 0; --d) {
      digit[d] = rest % dims[d];
      rest /= dims[d];
    }
    SweepPoint p;
    p.index = idx;
    p.sampler = cfg.sampler;
    if (!ax.alpha.empty()) p.sampler.alpha = ax.alpha[digit[0]];
    if (!ax.eta.empty()) p.sampler.langevin_eta = ax.eta[digit[1]];
    if (!ax.sigma_hat_scale.empty()) p.sampler.sigma_hat_scale = ax.sigma_hat_scale[digit[2]];
    if (!ax.probes.empty()) p.sampler.mc_probes = ax.probes[digit[3]];
    if (!ax.substeps.empty()) p.sampler.ode_substeps = ax.substeps[digit[4]];
    if (!ax.sure_repeats.empty()) p.sampler.sure_repeats = ax.sure_repeats[digit[5]];
    points.push_back(std::move(p));
  }
  return points;
}

std::string step_csv_name(const std::string& hash, std::size_t sweep, std::size_t repeat) {
  return hash + "_p" + std::to_string(sweep) + "_r" + std::to_string(repeat) + "_steps.csv";
}
std::string summary_csv_name(const std::string& hash) { return hash + "_summary.csv"; }
std::string influx_svg_name(const std::string& hash) { return hash + "_influx.svg"; }
std::string influx_csv_name(const std::string& hash) { return hash + "_influx.csv"; }

std::string resolve_output_dir(const ExperimentConfig& cfg) {
  const char* env = std::getenv("SGPS_OUTPUT_DIR");
  if (env && *env) return env;
  return cfg.output_dir;
}

int ExperimentOutcome::exit_code() const {
  if (failures == 0) return kExitOk;
  return failures == runs ? kExitFailed : kExitPartial;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const std::string& output_dir) {
  const Task task = build_task(cfg);
  const std::string hash = cfg.hash_hex();
  const std::filesystem::path dir(output_dir);
  std::filesystem::create_directories(dir);

  ExperimentOutcome outcome;
  const auto points = expand_sweep(cfg);
  const std::size_t steps = cfg.sampler.steps;
  // Per-step means of sweep point 0 for the plot.
  std::vector<double> sigma_t(steps), raw(steps, 0.0), used(steps, 0.0), p_x0t(steps, 0.0), p_x0ty(steps, 0.0),
      p_star(steps, 0.0);
  std::vector<std::size_t> n_raw(steps, 0), n_used(steps, 0), n_psnr(steps, 0);

  for (const auto& point : points) {
    for (std::size_t rep = 0; rep < cfg.repeats; ++rep) {
      const Instance inst = draw_instance(cfg, task, rep);
      SummaryRow row;
      row.sweep_index = point.index;
      row.repeat = rep;
      row.alpha = point.sampler.alpha;
      row.eta = point.sampler.langevin_eta.value_or(kNotMeasured);
      row.sigma_hat_scale = point.sampler.sigma_hat_scale;
      row.probes = point.sampler.mc_probes;
      row.substeps = point.sampler.ode_substeps;
      row.sure_repeats = point.sampler.sure_repeats;
      row.sure_enabled = point.sampler.sure_enabled;
      ++outcome.runs;
      RunReport report;
      try {
        RunResult result = sgps_run(*task.denoiser, *task.op, inst.y, point.sampler, run_stream(cfg, rep), &inst.x0);
        report = std::move(result.report);
        row.final = report.final;
        std::vector<double> levels;
        for (const auto& s : report.steps) {
          levels.push_back(s.sigma_hat_used);
          if (s.sure_skipped) ++row.skipped_steps;
        }
        row.mean_sigma_hat = finite_mean(levels);
      } catch (const DivergenceError& e) {
        row.status = "diverged";
        row.error = e.what();
        ++outcome.failures;
      }
      const std::string name = step_csv_name(hash, point.index, rep);
      std::ostringstream csv;
      write_step_csv(csv, report);
      write_file((dir / name).string(), csv.str());
      outcome.files.push_back(name);
      outcome.rows.push_back(row);

      if (point.index == 0) {
        for (const auto& s : report.steps) {
          const std::size_t i = s.step;
          sigma_t[i] = s.sigma_t;
          if (std::isfinite(s.sigma_hat_raw)) raw[i] += s.sigma_hat_raw, ++n_raw[i];
          if (std::isfinite(s.sigma_hat_used)) used[i] += s.sigma_hat_used, ++n_used[i];
          if (std::isfinite(s.psnr_x0t) && std::isfinite(s.psnr_x0ty) && std::isfinite(s.psnr_star)) {
            p_x0t[i] += s.psnr_x0t, p_x0ty[i] += s.psnr_x0ty, p_star[i] += s.psnr_star, ++n_psnr[i];
          }
        }
      }
    }
  }

  std::ostringstream summary;
  write_summary_csv(summary, outcome.rows);
  write_file((dir / summary_csv_name(hash)).string(), summary.str());
  outcome.files.push_back(summary_csv_name(hash));

  auto average = [](std::vector<double>& v, const std::vector<std::size_t>& n) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = n[i] ? v[i] / static_cast<double>(n[i]) : kNotMeasured;
  };
  average(raw, n_raw);
  average(used, n_used);
  average(p_x0t, n_psnr);
  average(p_x0ty, n_psnr);
  average(p_star, n_psnr);
  std::vector<double> xs(steps);
  for (std::size_t i = 0; i < steps; ++i) xs[i] = static_cast<double>(i);
  Chart levels{"noise level per step", "step", "sigma", true,
               {{"sigma_t", xs, sigma_t}, {"sigma_hat raw", xs, raw}, {"sigma_hat used", xs, used}}};
  Chart quality{"PSNR per step", "step", "dB", false,
                {{"x0|t", xs, p_x0t}, {"x0|t,y", xs, p_x0ty}, {"corrected", xs, p_star}}};
  write_file((dir / influx_svg_name(hash)).string(), render_svg_pair(levels, quality));
  outcome.files.push_back(influx_svg_name(hash));
  return outcome;
}

ExperimentOutcome run_influx(const ExperimentConfig& cfg, const std::string& output_dir) {
  const Task task = build_task(cfg);
  const std::string hash = cfg.hash_hex();
  const std::filesystem::path dir(output_dir);
  std::filesystem::create_directories(dir);

  const std::size_t steps = cfg.sampler.steps;
  std::vector<InfluxRow> rows(steps);
  std::vector<std::size_t> counts(steps, 0);
  for (auto& r : rows) {
    r.sigma_hat_with = r.sigma_hat_without = 0.0;
    r.psnr_x0t = r.psnr_x0ty = r.psnr_star_with = r.psnr_x0ty_without = 0.0;
  }

  ExperimentOutcome outcome;
  for (std::size_t rep = 0; rep < cfg.repeats; ++rep) {
    const Instance inst = draw_instance(cfg, task, rep);
    outcome.runs += 2;
    try {
      const InfluxTrace trace =
          noise_influx_trace(*task.denoiser, *task.op, inst.y, cfg.sampler, run_stream(cfg, rep), &inst.x0);
      for (std::size_t i = 0; i < steps; ++i) {
        const auto& w = trace.with_sure.report.steps[i];
        const auto& wo = trace.without_sure.report.steps[i];
        rows[i].step = i;
        rows[i].sigma_t = w.sigma_t;
        rows[i].sigma_hat_with += w.sigma_hat_star;
        rows[i].sigma_hat_without += wo.sigma_hat_raw;
        rows[i].psnr_x0t += w.psnr_x0t;
        rows[i].psnr_x0ty += w.psnr_x0ty;
        rows[i].psnr_star_with += w.psnr_star;
        rows[i].psnr_x0ty_without += wo.psnr_x0ty;
        ++counts[i];
      }
    } catch (const DivergenceError&) {
      outcome.failures += 2;
    }
  }
  for (std::size_t i = 0; i < steps; ++i) {
    const double n = static_cast<double>(counts[i]);
    InfluxRow& r = rows[i];
    for (double* v : {&r.sigma_hat_with, &r.sigma_hat_without, &r.psnr_x0t, &r.psnr_x0ty, &r.psnr_star_with,
                      &r.psnr_x0ty_without}) {
      *v = counts[i] ? *v / n : kNotMeasured;
    }
  }

  std::ostringstream csv;
  write_influx_csv(csv, rows);
  write_file((dir / influx_csv_name(hash)).string(), csv.str());
  outcome.files.push_back(influx_csv_name(hash));

  std::vector<double> xs, st, with, without, px0t, pwith, pwithout;
  for (const auto& r : rows) {
    xs.push_back(static_cast<double>(r.step));
    st.push_back(r.sigma_t);
    with.push_back(r.sigma_hat_with);
    without.push_back(r.sigma_hat_without);
    px0t.push_back(r.psnr_x0t);
    pwith.push_back(r.psnr_star_with);
    pwithout.push_back(r.psnr_x0ty_without);
  }
  Chart levels{"estimated noise level", "step", "sigma", true,
               {{"sigma_t", xs, st}, {"with SURE", xs, with}, {"without SURE", xs, without}}};
  Chart quality{"PSNR", "step", "dB", false,
                {{"x0|t", xs, px0t}, {"with SURE", xs, pwith}, {"without SURE", xs, pwithout}}};
  write_file((dir / influx_svg_name(hash)).string(), render_svg_pair(levels, quality));
  outcome.files.push_back(influx_svg_name(hash));
  return outcome;
}

}  // namespace sgps::harness
