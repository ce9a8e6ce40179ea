#include "mshyper/commands.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>

#include "mshyper/checkpoint.hpp"
#include "mshyper/error.hpp"
#include "mshyper/gradcheck.hpp"
#include "mshyper/hyperedge_graph.hpp"
#include "mshyper/hypergraph.hpp"
#include "mshyper/synthetic.hpp"
#include "mshyper/training.hpp"

namespace mshyper {
namespace {

namespace fs = std::filesystem;

constexpr double kGradTolerance = 1e-4;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

fs::path prepare_run_directory(const RunConfig& cfg) {
  fs::path dir = resolve_run_directory(cfg);
  fs::create_directories(dir);
  write_file(dir / "config.toml", cfg.canonical());
  return dir;
}

// Model config with the variable count taken from the data where allowed.
ModelConfig model_for(const RunConfig& cfg, const Dataset& d) {
  ModelConfig m = cfg.model;
  if (cfg.variables_from_data) m.variables = d.variables();
  m.validate();
  return m;
}

Splits split_for(const RunConfig& cfg, const Dataset& d, const ModelConfig& m) {
  return chronological_split(d, cfg.split, m.input_len + m.horizon);
}

std::string checkpoint_path(const RunConfig& cfg, const CommandOptions& opts) {
  if (opts.checkpoint) return *opts.checkpoint;
  if (!cfg.out_dir.empty()) return (fs::path(cfg.out_dir) / "model.ckpt").string();
  throw MissingArtifactError("no checkpoint: pass --checkpoint FILE or --out RUN_DIR");
}

ModelParams load_model(const RunConfig& cfg, const CommandOptions& opts, const ModelConfig& m) {
  const std::string path = checkpoint_path(cfg, opts);
  ModelParams params = init_params(m, cfg.train.seed);
  load_checkpoint(path, params);
  return params;
}

int build_graph(const RunConfig& cfg, std::ostream& out) {
  const Hypergraph g = build_hypergraph(cfg.model);
  const HyperedgeGraph heg = build_hyperedge_graph(g);
  const fs::path dir = prepare_run_directory(cfg);
  write_file(dir / "hypergraph.tsv", dump_sparse(g));
  write_file(dir / "hyperedge_graph.tsv", dump_adjacency(heg));
  out << "nodes\t" << g.node_count() << "\nhyperedges\t" << g.edge_count() << "\nincidence\t"
      << g.pattern().nnz() << "\nwrote\t" << dir.string() << "\n";
  return 0;
}

int dump_graph(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  const Hypergraph g = build_hypergraph(cfg.model);
  if (opts.adjacency) {
    out << dump_adjacency(build_hyperedge_graph(g));
  } else {
    out << dump_sparse(g);
  }
  return 0;
}

int train_command(const RunConfig& cfg, std::ostream& out) {
  const Dataset data = load_run_dataset(cfg);
  const ModelConfig m = model_for(cfg, data);
  const Splits parts = split_for(cfg, data, m);
  const fs::path dir = prepare_run_directory(cfg);

  std::string log;
  TrainResult result = train(parts.train, parts.val, m, cfg.train, [&](const EpochRecord& r) {
    const std::string line = format_epoch_line(r);
    log += line + "\n";
    out << line << "\n" << std::flush;
  });
  const GraphBundle graphs = GraphBundle::build(m);
  const Metrics test = evaluate(result.params, parts.test, m, graphs);
  const std::string test_line = format_test_line(test);
  log += test_line + "\n";

  save_checkpoint((dir / "model.ckpt").string(), result.params);
  write_file(dir / "history.csv", history_csv(result.history));
  write_file(dir / "train.log", log);

  const Metrics naive = naive_baseline(parts.test, m.input_len, m.horizon);
  char buf[128];
  std::snprintf(buf, sizeof buf, "naive\t%.6f\t%.6f", naive.mse, naive.mae);
  out << test_line << "\n" << buf << "\n";
  out << "best_epoch\t" << result.best_epoch << "\nwrote\t" << dir.string() << "\n";
  return 0;
}

int eval_command(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  const Dataset data = load_run_dataset(cfg);
  const ModelConfig m = model_for(cfg, data);
  ModelParams params = load_model(cfg, opts, m);
  const Splits parts = split_for(cfg, data, m);
  const GraphBundle graphs = GraphBundle::build(m);
  out << format_test_line(evaluate(params, parts.test, m, graphs)) << "\n";
  return 0;
}

int predict_command(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  const Dataset data = load_run_dataset(cfg);
  const ModelConfig m = model_for(cfg, data);
  ModelParams params = load_model(cfg, opts, m);
  if (data.rows() < m.input_len) {
    throw SplitError(data.name + ": " + std::to_string(data.rows()) + " rows, predict needs input_len = " +
                     std::to_string(m.input_len));
  }
  const Dataset tail = data.slice(data.rows() - m.input_len, m.input_len, ":tail");
  const GraphBundle graphs = GraphBundle::build(m);
  const Tensor pred = forecast(tail.values, m, params, graphs);

  std::string csv;
  for (std::size_t c = 0; c < data.columns.size(); ++c) csv += (c ? "," : "") + data.columns[c];
  csv += "\n";
  char buf[64];
  for (std::size_t r = 0; r < pred.rows(); ++r) {
    for (std::size_t c = 0; c < pred.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%s%.17g", c ? "," : "", pred.at(r, c));
      csv += buf;
    }
    csv += "\n";
  }
  const fs::path dir = prepare_run_directory(cfg);
  write_file(dir / "predictions.csv", csv);
  out << csv;
  return 0;
}

int gradcheck_command(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  const ModelConfig& m = cfg.model;
  m.validate();
  ModelParams params = init_params(m, cfg.train.seed);
  const GraphBundle graphs = GraphBundle::build(m);

  std::mt19937_64 rng(cfg.train.seed);
  std::normal_distribution<double> normal;
  Tensor window({m.input_len, m.variables});
  Tensor target({m.horizon, m.variables});
  for (double& v : window.values()) v = normal(rng);
  for (double& v : target.values()) v = normal(rng);

  auto all = params.all();
  GradCheckOptions options;
  options.max_coordinates = opts.grad_coordinates;
  options.seed = cfg.train.seed;
  const GradCheckReport report = grad_check(
      [&](Tape& tape) { return mse_loss(forward(tape, window, m, params, graphs).prediction, target); }, all,
      options);
  const bool ok = report.max_rel_error < kGradTolerance;
  char buf[160];
  std::snprintf(buf, sizeof buf, "max_rel_err %.3e %s 1e-4 (%zu coordinates)", report.max_rel_error,
                ok ? "<" : ">=", report.coordinates);
  out << buf << "\n";
  return ok ? 0 : 1;
}

int make_synthetic_command(const RunConfig& cfg, std::ostream& out) {
  const fs::path dir = prepare_run_directory(cfg);
  write_file(dir / "synthetic.csv", to_csv(make_synthetic(cfg.synthetic_spec)));
  out << "wrote\t" << (dir / "synthetic.csv").string() << "\n";
  return 0;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"build-graph", "dump-graph", "train",         "predict",
                                              "eval",        "gradcheck",  "make-synthetic"};
  return names;
}

std::string resolve_run_directory(const RunConfig& cfg) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &utc);
  return (fs::path("runs") / (cfg.hash() + "-" + stamp)).string();
}

Dataset load_run_dataset(const RunConfig& cfg) {
  if (cfg.synthetic) return make_synthetic(cfg.synthetic_spec);
  return load_csv(cfg.data_path);
}

int run_command(const std::string& cmd, const RunConfig& cfg, const CommandOptions& opts, std::ostream& out,
                std::ostream& err) {
  try {
    if (cmd == "build-graph") return build_graph(cfg, out);
    if (cmd == "dump-graph") return dump_graph(cfg, opts, out);
    if (cmd == "train") return train_command(cfg, out);
    if (cmd == "predict") return predict_command(cfg, opts, out);
    if (cmd == "eval") return eval_command(cfg, opts, out);
    if (cmd == "gradcheck") return gradcheck_command(cfg, opts, out);
    if (cmd == "make-synthetic") return make_synthetic_command(cfg, out);
    throw ConfigError("unknown command '" + cmd + "'");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace mshyper
