// ftr: command-line front end for the FTR fading metrics.
//
//   ftr metrics  --model ftr --k 1 --delta 1 --m 1 [--format json|csv]
//   ftr map      --k 1 [--m-min 0.1 --m-max 5 --m-steps 64 ...] --out map.csv
//   ftr curves   --metric op|capacity --model rician --k 3 [--snr-db-min 0 ...]
//   ftr validate [--samples 1000000] [--seed N] [--grid default]
//
// Exit codes: 0 success, 1 validation failure, 2 usage or domain error,
// 3 numerical non-convergence.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ftr/ftr.hpp"

namespace {

enum Exit : int { kOk = 0, kValidationFailed = 1, kUsage = 2, kNoConvergence = 3 };

struct ModelFlags {
  std::string name = "ftr";
  std::optional<double> k, delta, m, q;

  void attach(CLI::App& app) {
    app.add_option("--model", name, "ftr, twdp, ftw, two-wave, rician-shadowed, rician, hoyt, rayleigh")
        ->capture_default_str();
    app.add_option("--k", k, "specular to diffuse power ratio K");
    app.add_option("--delta", delta, "specular balance delta in [0, 1]");
    app.add_option("--m", m, "Gamma shape m of the LoS fluctuation");
    app.add_option("--q", q, "Hoyt shape q in (0, 1]");
  }

  ftr::NamedModel named() const {
    const auto tag = ftr::parse_model_tag(name);
    if (!tag) throw ftr::domain_error("unknown model '" + name + "'");
    // which native parameters each model takes
    const std::map<ftr::ModelTag, std::string> takes{
        {ftr::ModelTag::Ftr, "kdm"}, {ftr::ModelTag::Twdp, "kd"},          {ftr::ModelTag::Ftw, "dm"},
        {ftr::ModelTag::TwoWave, "d"}, {ftr::ModelTag::RicianShadowed, "km"}, {ftr::ModelTag::Rician, "k"},
        {ftr::ModelTag::Hoyt, "q"},   {ftr::ModelTag::Rayleigh, ""}};
    const std::string& want = takes.at(*tag);
    auto check = [&](const std::optional<double>& v, char c, const char* flag) {
      const bool used = want.find(c) != std::string::npos;
      if (used && !v) throw ftr::domain_error(std::string("model ") + name + " needs " + flag);
      if (!used && v) throw ftr::domain_error(std::string(flag) + " does not apply to model " + name);
    };
    check(k, 'k', "--k");
    check(delta, 'd', "--delta");
    check(m, 'm', "--m");
    check(q, 'q', "--q");
    return {*tag, k.value_or(0.0), delta.value_or(0.0), m.value_or(1.0), q.value_or(1.0)};
  }
};

/// Writes to the named file, or to stdout for "-".
class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return path_ == "-" ? std::cout : file_; }
  void close() {
    if (path_ == "-") {
      std::cout.flush();
      return;
    }
    file_.close();
    if (!file_) throw std::runtime_error("error writing " + path_);
  }

 private:
  std::string path_;
  std::ofstream file_;
};

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }
nlohmann::json optional_json(const std::optional<bool>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

int cmd_metrics(const ModelFlags& flags, const std::string& format, double tol) {
  const auto named = flags.named();
  const auto model = ftr::resolve(named);
  const auto verdict = ftr::classify(model, tol);
  const auto report = ftr::evaluate_report(model);

  nlohmann::ordered_json j;
  j["model"] = flags.name;
  if (named.tag == ftr::ModelTag::Hoyt) j["q"] = named.q;
  j["k"] = model.limits.k_infinite ? nlohmann::ordered_json() : nlohmann::ordered_json(model.params.k);
  j["delta"] = model.params.delta;
  j["m"] = model.limits.m_infinite ? nlohmann::ordered_json() : nlohmann::ordered_json(model.params.m);
  j["k_infinite"] = model.limits.k_infinite;
  j["m_infinite"] = model.limits.m_infinite;
  j["aof"] = report.aof;
  j["power_offset_db"] = optional_json(report.power_offset_db);
  j["capacity_loss_nats"] = report.capacity_loss_nats;
  j["capacity_loss_bits"] = report.capacity_loss_bits;
  j["diversity_order"] = optional_json(report.diversity_order);
  j["aof_sense"] = optional_json(verdict.aof_sense);
  j["op_sense"] = optional_json(verdict.op_sense);
  j["capacity_sense"] = optional_json(verdict.capacity_sense);
  j["class"] = std::string(ftr::level_name(verdict));

  if (format == "json") {
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  std::string header;
  std::string row;
  for (auto it = j.begin(); it != j.end(); ++it) {
    header += (header.empty() ? "" : ",") + it.key();
    std::string cell;
    if (it->is_number_float()) cell = ftr::sweep::format_number(it->get<double>());
    else if (it->is_string()) cell = it->get<std::string>();
    else if (!it->is_null()) cell = it->dump();
    row += (it == j.begin() ? "" : ",") + cell;
  }
  std::cout << header << '\n' << row << '\n';
  return kOk;
}

struct MapFlags {
  ftr::sweep::GridSpec grid;
  std::string outputs = "aof,po_db,dc_nats,class";
  std::string out = "-";
  std::string boundary;
  unsigned threads = 0;
};

ftr::sweep::MapOutputs parse_outputs(const std::string& list) {
  ftr::sweep::MapOutputs o{false, false, false, false};
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "aof") o.aof = true;
    else if (item == "po_db") o.po_db = true;
    else if (item == "dc_nats") o.dc_nats = true;
    else if (item == "class") o.classes = true;
    else throw ftr::domain_error("unknown map output '" + item + "'");
  }
  return o;
}

int cmd_map(MapFlags flags) {
  flags.grid.outputs = parse_outputs(flags.outputs);
  const auto rows = ftr::sweep::compute_map(flags.grid, flags.threads);
  Output out(flags.out);
  ftr::sweep::write_map_csv(out.stream(), rows, flags.grid.outputs);
  out.close();
  std::string boundary = flags.boundary;
  if (boundary.empty() && flags.out != "-") boundary = flags.out + ".boundary.csv";
  if (!boundary.empty()) {
    Output b(boundary);
    ftr::sweep::write_boundary_csv(b.stream(), flags.grid);
    b.close();
  }
  return kOk;
}

int cmd_curves(const ModelFlags& model_flags, const std::string& metric, ftr::sweep::CurveSpec spec,
               double threshold_db, const std::string& out_path) {
  if (metric == "op") spec.metric = ftr::sweep::CurveMetric::Op;
  else if (metric == "capacity") spec.metric = ftr::sweep::CurveMetric::Capacity;
  else throw ftr::domain_error("--metric must be op or capacity");
  spec.threshold = std::pow(10.0, threshold_db / 10.0);
  const auto points = ftr::sweep::compute_curve(ftr::resolve(model_flags.named()), spec);
  Output out(out_path);
  ftr::sweep::write_curve_csv(out.stream(), points);
  out.close();
  return kOk;
}

int cmd_validate(const ftr::sweep::ValidateConfig& cfg, const std::string& grid) {
  if (cfg.samples < ftr::sweep::kMinValidateSamples) {
    throw ftr::domain_error("--samples must be at least " + std::to_string(ftr::sweep::kMinValidateSamples));
  }
  const auto results = ftr::sweep::run_validate(ftr::sweep::validate_preset(grid), cfg);
  ftr::sweep::write_validate_table(std::cout, results);
  std::size_t failed = 0;
  std::size_t skipped = 0;
  for (const auto& r : results) {
    failed += r.status == ftr::sweep::CheckStatus::Fail;
    skipped += r.status == ftr::sweep::CheckStatus::Skipped;
  }
  std::cout << "checks " << results.size() << ", failed " << failed << ", skipped " << skipped << ", samples "
            << cfg.samples << ", seed " << cfg.seed << '\n';
  return failed ? kValidationFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fluctuating two-ray fading: closed-form metrics, maps and Monte Carlo validation"};
  app.require_subcommand(1);

  ModelFlags metric_model;
  std::string format = "json";
  double tol = ftr::kDefaultClassifyTol;
  auto* metrics = app.add_subcommand("metrics", "metrics and hyper-Rayleigh class of one model");
  metric_model.attach(*metrics);
  metrics->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  metrics->add_option("--tol", tol, "margin below which a sense does not count")->capture_default_str();

  MapFlags map_flags;
  auto* map = app.add_subcommand("map", "(m, delta) map at fixed K as CSV");
  map->add_option("--k", map_flags.grid.k_fixed, "fixed K")->capture_default_str();
  map->add_option("--m-min", map_flags.grid.m_min)->capture_default_str();
  map->add_option("--m-max", map_flags.grid.m_max)->capture_default_str();
  map->add_option("--m-steps", map_flags.grid.m_steps, "log-spaced")->capture_default_str();
  map->add_option("--delta-min", map_flags.grid.delta_min)->capture_default_str();
  map->add_option("--delta-max", map_flags.grid.delta_max)->capture_default_str();
  map->add_option("--delta-steps", map_flags.grid.delta_steps, "linearly spaced")->capture_default_str();
  map->add_option("--outputs", map_flags.outputs, "comma list of aof, po_db, dc_nats, class")->capture_default_str();
  map->add_option("--out", map_flags.out, "output file, - for stdout")->capture_default_str();
  map->add_option("--boundary", map_flags.boundary, "AoF boundary file (default <out>.boundary.csv)");
  map->add_option("--threads", map_flags.threads, "0 for all cores")->capture_default_str();

  ModelFlags curve_model;
  std::string curve_metric = "op";
  ftr::sweep::CurveSpec curve_spec;
  double threshold_db = 0.0;
  std::string curve_out = "-";
  auto* curves = app.add_subcommand("curves", "asymptotic OP or capacity against mean SNR as CSV");
  curve_model.attach(*curves);
  curves->add_option("--metric", curve_metric, "op or capacity")->capture_default_str();
  curves->add_option("--snr-db-min", curve_spec.snr_db_min)->capture_default_str();
  curves->add_option("--snr-db-max", curve_spec.snr_db_max)->capture_default_str();
  curves->add_option("--snr-db-steps", curve_spec.steps)->capture_default_str();
  curves->add_option("--threshold-db", threshold_db, "outage threshold gamma_th in dB")->capture_default_str();
  curves->add_option("--out", curve_out, "output file, - for stdout")->capture_default_str();

  ftr::sweep::ValidateConfig validate_cfg;
  std::string grid = "default";
  auto* validate = app.add_subcommand("validate", "closed forms against Monte Carlo");
  validate->add_option("--samples", validate_cfg.samples, "draws per point (tail uses 10x)")->capture_default_str();
  validate->add_option("--seed", validate_cfg.seed)->capture_default_str();
  validate->add_option("--grid", grid, "preset: default or small")->capture_default_str();
  validate->add_option("--threads", validate_cfg.threads, "0 for all cores")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*metrics) return cmd_metrics(metric_model, format, tol);
    if (*map) return cmd_map(map_flags);
    if (*curves) return cmd_curves(curve_model, curve_metric, curve_spec, threshold_db, curve_out);
    if (*validate) return cmd_validate(validate_cfg, grid);
  } catch (const ftr::convergence_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
