#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>

#include "cli/parallel.hpp"
#include "cli/synth.hpp"
#include "sparse_align/errors.hpp"
#include "sparse_align/metrics.hpp"
#include "sparse_align/rationale.hpp"

namespace sparse_align::cli {

namespace {

json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

json metric_json(const MetricValue& v) {
  return {{"value", v.value}, {"evaluated", v.evaluated}, {"skipped", v.skipped}};
}

json alignment_json(const DocumentAlignment& a) {
  json pairs = json::array();
  for (const auto& p : a.alignment.active_pairs) pairs.push_back(to_json(p));
  return {{"variant", to_string(a.alignment.spec.variant)},
          {"k", a.alignment.spec.k},
          {"metric", to_string(a.metric)},
          {"lambda", a.alignment.lambda},
          {"cost_matrix", to_json(a.cost)},
          {"cost_shift", a.cost_shift},
          {"plan", to_json(a.alignment.plan)},
          {"active_pairs", std::move(pairs)},
          {"original_cost", a.alignment.original_cost},
          {"augmented_cost", a.alignment.augmented_cost},
          {"augmented_size", augmented_size(a.cost.rows(), a.cost.cols(), a.alignment.spec)},
          {"similarity", a.similarity},
          {"solver", {{"converged", a.alignment.solver_converged}, {"iterations", a.alignment.solver_iterations}}},
          {"warnings", a.warnings}};
}

std::vector<json> as_list(const json& j) {
  if (j.is_array()) return std::vector<json>(j.begin(), j.end());
  return {j};
}

TransportPlan plan_from_alignment(const json& j) {
  return plan_from_json(j.contains("plan") ? j.at("plan") : j);
}

// Soft indicators carry 1/N mass per selected point; scaling by N puts them
// on the 0/1 scale of the gold labels.
double soft_scale(const json& alignment, const TransportPlan& p) {
  const std::size_t n_hat = alignment.value("augmented_size", std::size_t{0});
  return static_cast<double>(n_hat > 0 ? n_hat : std::max(p.rows(), p.cols()));
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

json run_align(const AlignOptions& options) {
  const auto table = load_embeddings(options.embeddings);
  const auto x = load_document(options.doc_x, table);
  const auto y = load_document(options.doc_y, table);
  const auto aligned = align_documents(x, y, options.settings);
  json report = alignment_json(aligned);
  report["spans_x"] = x.spans.spans;
  report["spans_y"] = y.spans.spans;
  report["doc_x"] = x.path;
  report["doc_y"] = y.path;
  return report;
}

json run_rank(const RankOptions& options) {
  const json manifest = read_json_file(options.manifest);
  if (!manifest.is_array() || manifest.empty()) throw InputError("rank manifest must be a non-empty JSON array");
  const auto base = options.manifest.parent_path();
  const auto table = load_embeddings(options.embeddings);

  struct Task {
    std::size_t query;
    std::string candidate;
    bool relevant;
  };
  std::vector<std::string> queries;
  std::vector<Task> tasks;
  try {
    for (const auto& entry : manifest) {
      queries.push_back(entry.at("query").get<std::string>());
      for (const auto& cand : entry.at("candidates"))
        tasks.push_back({queries.size() - 1, cand.at("path").get<std::string>(), cand.at("relevant").get<bool>()});
    }
  } catch (const json::exception& e) {
    throw ParseError(options.manifest.string() + ": " + e.what());
  }

  // Load every distinct document once; failures are recorded per document.
  std::map<std::string, std::size_t> doc_index;
  std::vector<std::string> doc_paths;
  for (const auto& q : queries)
    if (doc_index.emplace(q, doc_paths.size()).second) doc_paths.push_back(q);
  for (const auto& t : tasks)
    if (doc_index.emplace(t.candidate, doc_paths.size()).second) doc_paths.push_back(t.candidate);
  std::vector<std::optional<Document>> docs(doc_paths.size());
  std::vector<std::string> doc_errors(doc_paths.size());
  parallel_for(doc_paths.size(), options.workers, [&](std::size_t d) {
    try {
      docs[d] = load_document(resolve(base, doc_paths[d]), table);
    } catch (const Error& e) {
      doc_errors[d] = e.what();
    }
  });

  struct Scored {
    std::optional<double> score;
    std::optional<TransportPlan> plan;
    std::string error;
  };
  std::vector<Scored> scored(tasks.size());
  parallel_for(tasks.size(), options.workers, [&](std::size_t t) {
    const std::size_t qi = doc_index.at(queries[tasks[t].query]);
    const std::size_t ci = doc_index.at(tasks[t].candidate);
    if (!docs[qi]) return void(scored[t].error = doc_errors[qi]);
    if (!docs[ci]) return void(scored[t].error = doc_errors[ci]);
    try {
      auto a = align_documents(*docs[qi], *docs[ci], options.settings);
      scored[t].score = a.similarity;
      scored[t].plan = std::move(a.alignment.plan);
    } catch (const Error& e) {
      scored[t].error = e.what();
    }
  });

  json per_query = json::array();
  json failures = json::array();
  std::vector<RankedList> lists;
  std::vector<TransportPlan> plans;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    json cands = json::array();
    std::vector<Candidate> ranked;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      if (tasks[t].query != q) continue;
      json c = {{"path", tasks[t].candidate}, {"relevant", tasks[t].relevant}};
      if (scored[t].score) {
        c["score"] = *scored[t].score;
        c["active_count"] = active_alignments(*scored[t].plan).size();
        ranked.push_back({tasks[t].candidate, *scored[t].score, tasks[t].relevant});
        plans.push_back(*scored[t].plan);
      } else {
        c["error"] = scored[t].error;
        failures.push_back({{"query", queries[q]}, {"candidate", tasks[t].candidate}, {"error", scored[t].error}});
      }
      cands.push_back(std::move(c));
    }
    per_query.push_back({{"query", queries[q]}, {"candidates", std::move(cands)}});
    if (ranked.empty()) {
      failures.push_back({{"query", queries[q]}, {"error", "no candidate could be scored"}});
      continue;
    }
    lists.emplace_back(queries[q], std::move(ranked));
  }

  const auto metrics = evaluate_rankings(lists);
  const auto sparsity = sparsity_stats(plans);
  return {{"queries", std::move(per_query)},
          {"auc", metric_json(metrics.auc)},
          {"map", metric_json(metrics.map)},
          {"mrr", metric_json(metrics.mrr)},
          {"p_at_1", metric_json(metrics.p_at_1)},
          {"sparsity",
           {{"mean_active_count", sparsity.mean_active_count},
            {"mean_active_percent", sparsity.mean_active_percent},
            {"plans", sparsity.plans}}},
          {"failures", std::move(failures)}};
}

json run_rationale(const RationaleOptions& options) {
  const auto alignments = as_list(read_json_file(options.alignment));
  const auto gold_json = as_list(read_json_file(options.gold));
  if (alignments.size() != gold_json.size()) {
    throw ShapeError("alignment file has " + std::to_string(alignments.size()) + " entries, gold has " +
                     std::to_string(gold_json.size()));
  }
  std::vector<TransportPlan> plans;
  std::vector<RationalePair> golds;
  for (std::size_t d = 0; d < alignments.size(); ++d) {
    plans.push_back(plan_from_alignment(alignments[d]));
    golds.push_back(rationale_from_json(gold_json[d]));
    if (golds.back().r_x.size() != plans.back().rows() || golds.back().r_y.size() != plans.back().cols()) {
      throw ShapeError("pair " + std::to_string(d) + ": gold rationale is " +
                       std::to_string(golds.back().r_x.size()) + "x" + std::to_string(golds.back().r_y.size()) +
                       " but the plan is " + std::to_string(plans.back().rows()) + "x" +
                       std::to_string(plans.back().cols()));
    }
  }

  json report;
  double delta = 0.0;
  if (options.delta) {
    delta = *options.delta;
  } else {
    const auto grid = options.delta_grid.empty() ? default_delta_grid(plans[0].rows(), plans[0].cols())
                                                 : options.delta_grid;
    delta = select_delta(plans, golds, grid);
    report["delta_grid"] = grid;
  }
  report["delta"] = delta;
  report["delta_selected"] = !options.delta.has_value();

  json pairs = json::array();
  for (std::size_t d = 0; d < plans.size(); ++d) {
    const auto r = binarize(plans[d], delta);
    auto soft = soft_rationales(plans[d]);
    const double scale = soft_scale(alignments[d], plans[d]);
    for (double& v : soft.s_x) v *= scale;
    for (double& v : soft.s_y) v *= scale;
    pairs.push_back({{"rationale", to_json(r)},
                     {"f1_x", token_f1(r.r_x, golds[d].r_x)},
                     {"f1_y", token_f1(r.r_y, golds[d].r_y)},
                     {"soft_scale", scale},
                     {"soft", {{"x", soft.s_x}, {"y", soft.s_y}}},
                     {"cross_entropy", rationale_cross_entropy(soft, golds[d].r_x, golds[d].r_y)}});
  }
  report["pairs"] = std::move(pairs);
  report["mean_f1"] = mean_rationale_f1(plans, golds, delta);
  return report;
}

json run_synth(const SynthOptions& options) {
  const auto c = synthetic_costs(options.rows, options.cols, options.seed);
  json variants = json::array();
  for (const auto& v : solve_synthetic(c, options.k, options.solver)) {
    json entry = {{"variant", to_string(v.spec.variant)}, {"k", v.spec.k}};
    if (v.spec.variant == Variant::RelaxedOneToK) entry["cost_offset"] = -kRelaxedOffset;
    if (v.alignment) {
      json pairs = json::array();
      for (const auto& p : v.alignment->active_pairs) pairs.push_back(to_json(p));
      entry["active_count"] = v.alignment->active_pairs.size();
      entry["active_pairs"] = std::move(pairs);
      entry["original_cost"] = v.alignment->original_cost;
      entry["lambda"] = v.alignment->lambda;
      entry["plan"] = to_json(v.alignment->plan);
    } else {
      entry["error"] = v.error;
    }
    variants.push_back(std::move(entry));
  }
  return {{"rows", options.rows},
          {"cols", options.cols},
          {"k", options.k},
          {"seed", options.seed},
          {"cost_matrix", to_json(c)},
          {"variants", std::move(variants)}};
}

json run_verify(const VerifyOptions& options) {
  json checks = json::array();
  bool all = true;
  for (const auto& check : run_verification(options)) {
    all = all && check.passed();
    checks.push_back(to_json(check));
  }
  return {{"seed", options.seed}, {"trials", options.trials}, {"max_size", options.max_size},
          {"checks", std::move(checks)}, {"passed", all}};
}

namespace {

struct Common {
  std::string variant = "vanilla";
  std::size_t k = 2;
  std::string metric;
  std::optional<double> lambda;
  std::optional<double> epsilon_final;
  std::string config;
  std::string out;
  std::string heatmap = "none";
  std::string heatmap_out;
};

void add_solver_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--epsilon-final", c.epsilon_final, "Final Sinkhorn epsilon (default 1e-4)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--config", c.config,
                  "Solver config JSON {epsilon_final, epsilon_start, scaling_factor, max_iter, tol, log_domain}")
      ->check(CLI::ExistingFile);
}

void add_alignment_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--variant", c.variant, "vanilla | one_to_k | relaxed_one_to_k | exact_k")
      ->capture_default_str();
  cmd->add_option("--k", c.k, "k for the constrained variants")->capture_default_str();
  cmd->add_option("--metric", c.metric,
                  "cosine_distance | negative_cosine | euclidean | dot_negative "
                  "(default: negative_cosine for relaxed_one_to_k, else cosine_distance)");
  cmd->add_option("--lambda", c.lambda, "Active-alignment threshold (default 0.01/(n*m))")
      ->check(CLI::NonNegativeNumber);
  add_solver_flags(cmd, c);
}

void add_output_flags(CLI::App* cmd, Common& c, bool heatmaps) {
  cmd->add_option("--out", c.out, "Write the JSON report here instead of stdout");
  if (!heatmaps) return;
  cmd->add_option("--heatmap", c.heatmap, "Heatmap format")
      ->check(CLI::IsMember({"text", "svg", "none"}))
      ->capture_default_str();
  cmd->add_option("--heatmap-out", c.heatmap_out,
                  "Heatmap path prefix (default: --out without its extension; text goes to stderr otherwise)");
}

SolverConfig solver_config(const Common& c) {
  SolverConfig cfg;
  if (!c.config.empty()) cfg = solver_config_from_json(read_json_file(c.config));
  if (c.epsilon_final) {
    cfg.epsilon_final = *c.epsilon_final;
    cfg.epsilon_start = std::max(cfg.epsilon_start, cfg.epsilon_final);
  }
  cfg.validate();
  return cfg;
}

AlignSettings align_settings(const Common& c) {
  AlignSettings s;
  s.spec = {parse_variant(c.variant), c.k};
  s.solver = solver_config(c);
  if (!c.metric.empty()) s.metric = parse_metric(c.metric);
  s.lambda = c.lambda;
  return s;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path.string());
  f << text;
}

// (label, plan, lambda) for every plan in a report that has one.
std::vector<std::tuple<std::string, TransportPlan, double>> report_plans(const json& report) {
  std::vector<std::tuple<std::string, TransportPlan, double>> out;
  if (report.contains("variants")) {
    for (const auto& v : report.at("variants"))
      if (v.contains("plan"))
        out.emplace_back(v.at("variant").get<std::string>(), plan_from_json(v.at("plan")), v.at("lambda").get<double>());
  } else if (report.contains("plan")) {
    out.emplace_back(report.at("variant").get<std::string>(), plan_from_json(report.at("plan")),
                     report.at("lambda").get<double>());
  }
  return out;
}

void emit_heatmaps(const json& report, const Common& c, std::ostream& err) {
  const auto format = parse_heatmap_format(c.heatmap);
  if (format == HeatmapFormat::None) return;
  std::string prefix = c.heatmap_out;
  if (prefix.empty() && !c.out.empty()) prefix = std::filesystem::path(c.out).replace_extension().string();
  if (prefix.empty() && format == HeatmapFormat::Svg)
    throw InputError("--heatmap svg needs --heatmap-out or --out to name the file");

  const auto plans = report_plans(report);
  const bool several = plans.size() > 1;
  for (const auto& [label, plan, lambda] : plans) {
    const std::string body = format == HeatmapFormat::Text ? text_heatmap(plan, lambda)
                                                           : svg_heatmap(plan, lambda, label + " alignment");
    if (prefix.empty()) {
      err << label << '\n' << body;
      continue;
    }
    const std::string path = prefix + (several ? "_" + label : "") + (format == HeatmapFormat::Text ? ".txt" : ".svg");
    write_file(path, body);
  }
}

void emit_report(const json& report, const Common& c, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (c.out.empty()) out << text;
  else write_file(c.out, text);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse constrained optimal-transport alignment of text spans", "sparse_align"};
  app.require_subcommand(1);

  Common common;
  AlignOptions align;
  RankOptions rank;
  RationaleOptions rationale;
  SynthOptions synth;
  VerifyOptions verify;
  std::string doc_x, doc_y, embeddings, manifest, alignment_path, gold_path;

  auto* align_cmd = app.add_subcommand("align", "Align the sentences of two documents");
  align_cmd->add_option("--x", doc_x, "First document (UTF-8 text)")->required()->check(CLI::ExistingFile);
  align_cmd->add_option("--y", doc_y, "Second document (UTF-8 text)")->required()->check(CLI::ExistingFile);
  align_cmd->add_option("--embeddings", embeddings, "Word vectors, 'token v1 ... vd' per line")
      ->required()
      ->check(CLI::ExistingFile);
  add_alignment_flags(align_cmd, common);
  add_output_flags(align_cmd, common, true);

  auto* rank_cmd = app.add_subcommand("rank", "Score and rank candidates from a manifest");
  rank_cmd->add_option("--manifest", manifest, "[{\"query\": path, \"candidates\": [{\"path\", \"relevant\"}]}]")
      ->required()
      ->check(CLI::ExistingFile);
  rank_cmd->add_option("--embeddings", embeddings, "Word vectors")->required()->check(CLI::ExistingFile);
  add_alignment_flags(rank_cmd, common);
  add_output_flags(rank_cmd, common, false);

  auto* rationale_cmd = app.add_subcommand("rationale", "Extract rationales from alignments and score them");
  rationale_cmd->add_option("--alignment", alignment_path, "Alignment JSON (align output, a plan, or a list)")
      ->required()
      ->check(CLI::ExistingFile);
  rationale_cmd->add_option("--gold", gold_path, "Gold rationales {\"x\": [...], \"y\": [...]} or a list")
      ->required()
      ->check(CLI::ExistingFile);
  auto* delta_opt = rationale_cmd->add_option("--delta", rationale.delta, "Fixed threshold")
                        ->check(CLI::NonNegativeNumber);
  rationale_cmd->add_option("--delta-grid", rationale.delta_grid, "Comma-separated thresholds to select from")
      ->delimiter(',')
      ->excludes(delta_opt);
  add_output_flags(rationale_cmd, common, false);

  auto* synth_cmd = app.add_subcommand("synth", "Solve every variant on a seeded synthetic cost matrix");
  synth_cmd->add_option("--rows", synth.rows)->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--cols", synth.cols)->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--k", synth.k, "k for exact_k (one_to_k variants clamp it)")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  add_solver_flags(synth_cmd, common);
  add_output_flags(synth_cmd, common, true);

  auto* verify_cmd = app.add_subcommand("verify", "Run the randomized invariant suite against the exact oracles");
  verify_cmd->add_option("--seed", verify.seed)->capture_default_str();
  verify_cmd->add_option("--trials", verify.trials)->check(CLI::PositiveNumber)->capture_default_str();
  verify_cmd->add_option("--max-size", verify.max_size, "Largest N for the enumeration checks")
      ->check(CLI::Range(2, 7))
      ->capture_default_str();
  add_output_flags(verify_cmd, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    json report;
    int code = kExitOk;
    if (*align_cmd) {
      align = {doc_x, doc_y, embeddings, align_settings(common)};
      report = run_align(align);
      for (const auto& w : report.at("warnings")) err << "warning: " << w.get<std::string>() << '\n';
    } else if (*rank_cmd) {
      rank = {manifest, embeddings, align_settings(common), worker_count()};
      report = run_rank(rank);
      for (const auto& f : report.at("failures")) err << "warning: " << f.dump() << '\n';
    } else if (*rationale_cmd) {
      rationale.alignment = alignment_path;
      rationale.gold = gold_path;
      report = run_rationale(rationale);
    } else if (*synth_cmd) {
      synth.solver = solver_config(common);
      report = run_synth(synth);
    } else if (*verify_cmd) {
      verify.workers = worker_count();
      report = run_verify(verify);
      if (!report.at("passed").get<bool>()) code = kExitVerification;
    }
    emit_report(report, common, out);
    emit_heatmaps(report, common, err);
    return code;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace sparse_align::cli
