#pragma once

// Batch commands behind the splitbench executable: extract, fit, ablate and
// report. Every artifact starts with a comment line carrying the config hash
// and seed, and is written atomically.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "splitbench/descriptive.hpp"
#include "splitbench/design_matrix.hpp"
#include "splitbench/features.hpp"
#include "splitbench/inference.hpp"
#include "splitbench/records.hpp"
#include "splitbench/report.hpp"
#include "splitbench/selection.hpp"

namespace splitbench {

enum ExitCode : int { kOk = 0, kValidation = 1, kConvergence = 2, kIo = 3 };

struct RunConfig {
  std::filesystem::path triples;
  std::filesystem::path judgments;
  std::filesystem::path word_list;
  std::filesystem::path out_dir = "out";
  std::vector<std::string> predictors = all_predictors();
  std::string profile = "desk";
  SamplerConfig sampler;
  double prior_sd = ModelSpec::kDefaultPriorSd;
  double rhat_gate = 1.05;
  double kernel_sigma = 1.0;
  bool keep_punctuation = true;
  bool structure_only_ted = true;
  bool tnodes_count_tokens = false;
  MatrixLayout layout = MatrixLayout::long_format;
  ScoreUnit score_unit = ScoreUnit::item_mean;
  std::vector<std::string> formats{"csv", "txt"};

  /// Sampler lengths for a named profile: desk = 1,000 + 1,000,
  /// paper = 50,000 + 4,000.
  void apply_profile(const std::string& name) {
    if (name == "desk") {
      sampler.warmup = 1000;
      sampler.draws = 1000;
    } else if (name == "paper") {
      sampler.warmup = 50000;
      sampler.draws = 4000;
    } else {
      throw ConfigError("unknown profile '" + name + "' (expected desk or paper)");
    }
    profile = name;
  }

  bool wants(const std::string& format) const {
    return std::find(formats.begin(), formats.end(), format) != formats.end();
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["triples"] = triples.generic_string();
    j["judgments"] = judgments.generic_string();
    j["word_list"] = word_list.generic_string();
    j["out_dir"] = out_dir.generic_string();
    j["predictors"] = predictors;
    j["profile"] = profile;
    j["sampler"] = {{"chains", sampler.chains},
                    {"warmup", sampler.warmup},
                    {"draws", sampler.draws},
                    {"seed", sampler.seed},
                    {"target_accept", sampler.target_accept},
                    {"path_length", sampler.path_length},
                    {"max_leapfrog", sampler.max_leapfrog},
                    {"prior_sd", prior_sd}};
    j["rhat_gate"] = rhat_gate;
    j["kernel_sigma"] = kernel_sigma;
    j["keep_punctuation"] = keep_punctuation;
    j["structure_only_ted"] = structure_only_ted;
    j["tnodes_count_tokens"] = tnodes_count_tokens;
    j["layout"] = layout == MatrixLayout::long_format ? "long" : "difference";
    j["score_unit"] = score_unit == ScoreUnit::item_mean ? "item_mean" : "rating";
    j["formats"] = formats;
    return j;
  }

  /// FNV-1a over the effective config; the output directory is excluded so
  /// the same run written to two places yields identical artifacts.
  std::uint64_t hash() const {
    auto j = to_json();
    j.erase("out_dir");
    const std::string text = j.dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return h;
  }

  std::string artifact_header(const std::string& command) const {
    char buf[128];
    std::snprintf(buf, sizeof buf, "# splitbench %s config_hash=%016llx seed=%llu\n",
                  command.c_str(), static_cast<unsigned long long>(hash()),
                  static_cast<unsigned long long>(sampler.seed));
    return buf;
  }

  PtbOptions ptb_options() const {
    PtbOptions o;
    o.keep_punctuation = keep_punctuation;
    return o;
  }
};

/// Reads a JSON config; relative paths resolve against the config's folder.
inline RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  RunConfig c;
  auto path_of = [&](const char* key, std::filesystem::path& out) {
    if (!j.contains(key)) return;
    std::filesystem::path p = j[key].get<std::string>();
    out = p.is_absolute() ? p : base_dir / p;
  };
  try {
    path_of("triples", c.triples);
    path_of("judgments", c.judgments);
    path_of("word_list", c.word_list);
    path_of("out_dir", c.out_dir);
    if (j.contains("profile")) c.apply_profile(j["profile"].get<std::string>());
    if (j.contains("predictors")) c.predictors = j["predictors"].get<std::vector<std::string>>();
    if (j.contains("features")) {
      // {"samsa": false, ...} toggles columns off the canonical list.
      std::vector<std::string> kept;
      for (const auto& p : c.predictors)
        if (j["features"].value(p, true)) kept.push_back(p);
      for (const auto& [k, v] : j["features"].items())
        if (!is_known_predictor(k)) throw ConfigError("unknown feature '" + k + "'");
      c.predictors = kept;
    }
    if (j.contains("sampler")) {
      const auto& s = j["sampler"];
      c.sampler.chains = s.value("chains", c.sampler.chains);
      c.sampler.warmup = s.value("warmup", c.sampler.warmup);
      c.sampler.draws = s.value("draws", c.sampler.draws);
      c.sampler.seed = s.value("seed", c.sampler.seed);
      c.sampler.target_accept = s.value("target_accept", c.sampler.target_accept);
      c.sampler.path_length = s.value("path_length", c.sampler.path_length);
      c.sampler.max_leapfrog = s.value("max_leapfrog", c.sampler.max_leapfrog);
      c.prior_sd = s.value("prior_sd", c.prior_sd);
    }
    c.rhat_gate = j.value("rhat_gate", c.rhat_gate);
    c.kernel_sigma = j.value("kernel_sigma", c.kernel_sigma);
    c.keep_punctuation = j.value("keep_punctuation", c.keep_punctuation);
    c.structure_only_ted = j.value("structure_only_ted", c.structure_only_ted);
    c.tnodes_count_tokens = j.value("tnodes_count_tokens", c.tnodes_count_tokens);
    if (j.contains("layout")) {
      const auto l = j["layout"].get<std::string>();
      if (l == "long") c.layout = MatrixLayout::long_format;
      else if (l == "difference") c.layout = MatrixLayout::difference;
      else throw ConfigError("unknown layout '" + l + "'");
    }
    if (j.contains("score_unit")) {
      const auto u = j["score_unit"].get<std::string>();
      if (u == "item_mean") c.score_unit = ScoreUnit::item_mean;
      else if (u == "rating") c.score_unit = ScoreUnit::rating;
      else throw ConfigError("unknown score_unit '" + u + "'");
    }
    if (j.contains("formats")) c.formats = j["formats"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  for (const auto& p : c.predictors)
    if (!is_known_predictor(p)) throw ConfigError("unknown predictor '" + p + "'");
  if (!(c.kernel_sigma > 0.0)) throw ConfigError("kernel_sigma must be positive");
  if (!(c.prior_sd > 0.0)) throw ConfigError("prior_sd must be positive");
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

namespace detail {

inline void require_file(const std::filesystem::path& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string("config does not name the ") + what + " file");
  if (!std::filesystem::is_regular_file(p))
    throw ConfigError(std::string(what) + " file not found: " + p.string());
}

inline void prepare_out_dir(const RunConfig& c) {
  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  if (ec) throw IoError("cannot create " + c.out_dir.string() + ": " + ec.message());
}

inline void emit(const RunConfig& c, const std::string& command, const std::string& file,
                 const std::string& body, std::ostream& log) {
  const auto path = c.out_dir / file;
  write_atomically(path, c.artifact_header(command) + body);
  log << "wrote " << path.string() << '\n';
}

inline std::vector<std::string> text_columns(const std::vector<std::string>& predictors) {
  std::vector<std::string> out;
  for (const auto& p : predictors)
    if (!is_perception_predictor(p)) out.push_back(p);
  return out;
}

inline FeatureContext feature_context(const RunConfig& c, const EasyWordList& words) {
  FeatureContext ctx;
  ctx.easy_words = &words;
  ctx.cohesion.kernel_sigma = c.kernel_sigma;
  ctx.cohesion.structure_only_ted = c.structure_only_ted;
  ctx.tnodes_count_tokens = c.tnodes_count_tokens;
  return ctx;
}

struct PreparedData {
  Dataset dataset;
  EasyWordList words;
  FeatureTable features;
};

inline PreparedData prepare(const RunConfig& c, const std::vector<std::string>& predictors) {
  require_file(c.triples, "triples");
  require_file(c.judgments, "judgments");
  require_file(c.word_list, "word list");
  PreparedData d;
  d.words = EasyWordList::load(c.word_list);
  d.dataset = ingest(c.judgments, c.triples, c.ptb_options());
  d.features = compute_feature_table(d.dataset, text_columns(predictors),
                                     feature_context(c, d.words));
  return d;
}

inline ModelSpec model_spec(const RunConfig& c, const std::vector<std::string>& predictors) {
  ModelSpec spec;
  spec.predictors = predictors;
  spec.prior_sd.assign(predictors.size() + 1, c.prior_sd);
  return spec;
}

}  // namespace detail

/// Per-(triple, side) text-derived features as CSV.
inline int cmd_extract(const RunConfig& c, std::ostream& log) {
  detail::require_file(c.triples, "triples");
  detail::require_file(c.word_list, "word list");
  const auto words = EasyWordList::load(c.word_list);
  Dataset ds = make_dataset(parse_triples(detail::read_file(c.triples), c.ptb_options(),
                                          c.triples.string()),
                            {});
  const auto columns = detail::text_columns(c.predictors);
  const auto table = compute_feature_table(ds, columns, detail::feature_context(c, words));

  std::vector<const Triple*> order;
  for (const auto& t : ds.triples) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(),
                   [](const Triple* a, const Triple* b) { return a->id < b->id; });
  std::ostringstream csv;
  csv << "triple_id,side,origin";
  for (const auto& n : columns) csv << ',' << n;
  csv << '\n';
  for (const auto* t : order) {
    for (SideId side : {SideId::a, SideId::b}) {
      csv << csv_field(t->id) << ',' << (side == SideId::a ? "a" : "b") << ','
          << to_string(t->side(side).origin);
      for (double v : table.row(t->id, side)) csv << ',' << exact(v);
      csv << '\n';
    }
  }
  detail::prepare_out_dir(c);
  detail::emit(c, "extract", "features.csv", csv.str(), log);
  log << order.size() * 2 << " feature rows\n";
  return kOk;
}

/// Full-model fit: posterior summary, histograms and draws. Returns
/// kConvergence when any R-hat exceeds the gate.
inline int cmd_fit(const RunConfig& c, std::ostream& log) {
  c.sampler.validate();
  auto data = detail::prepare(c, c.predictors);
  MatrixConfig mc;
  mc.predictors = c.predictors;
  mc.layout = c.layout;
  const auto matrix = build_design_matrix(data.dataset, data.features, mc);
  const auto spec = detail::model_spec(c, c.predictors);
  log << "fitting " << spec.dim() << " coefficients on " << matrix.rows() << " rows ("
      << c.sampler.chains << " chains x " << c.sampler.warmup << " warmup + " << c.sampler.draws
      << " draws)\n";
  const auto draws = sample_posterior(matrix, spec, c.sampler);
  const auto summary = summarize(draws);
  const double worst = max_rhat(summary);
  const bool gate_ok = worst <= c.rhat_gate;

  std::ostringstream txt;
  render_posterior_summary(txt, summary);
  txt << "rows: " << matrix.rows() << "\n";
  txt << "divergent transitions: " << draws.divergences() << " of "
      << draws.chains * draws.draws << "\n";
  if (draws.divergence_warning()) txt << "WARNING: more than 1% of transitions diverged\n";
  txt << "max r_hat: " << fixed(worst, 4) << " (gate " << fixed(c.rhat_gate, 2) << ": "
      << (gate_ok ? "pass" : "FAIL") << ")\n";
  log << txt.str();

  detail::prepare_out_dir(c);
  if (c.wants("txt")) detail::emit(c, "fit", "fit_summary.txt", txt.str(), log);
  if (c.wants("csv")) {
    std::ostringstream s, h, d;
    write_summary_csv(s, summary);
    write_histograms_csv(h, summary);
    write_draws_csv(d, draws);
    detail::emit(c, "fit", "fit_summary.csv", s.str(), log);
    detail::emit(c, "fit", "fit_histograms.csv", h.str(), log);
    detail::emit(c, "fit", "draws.csv", d.str(), log);
  }
  return gate_ok ? kOk : kConvergence;
}

struct AblateOptions {
  bool reduced = false;
  std::vector<std::string> predictors;  // overrides the config when non-empty
};

/// WAIC ablation table over base plus one model per removed predictor.
inline int cmd_ablate(const RunConfig& c, const AblateOptions& opts, std::ostream& log) {
  c.sampler.validate();
  std::vector<std::string> predictors = c.predictors;
  std::string stem = "ablation";
  if (!opts.predictors.empty()) {
    predictors = opts.predictors;
    stem = "ablation_custom";
  } else if (opts.reduced) {
    predictors = reduced_predictors();
    stem = "ablation_reduced";
  }
  for (const auto& p : predictors)
    if (!is_known_predictor(p)) throw ConfigError("unknown predictor '" + p + "'");
  auto data = detail::prepare(c, predictors);
  MatrixConfig mc;
  mc.predictors = predictors;
  mc.layout = c.layout;
  const auto matrix = build_design_matrix(data.dataset, data.features, mc);
  log << "ablating " << predictors.size() << " predictors on " << matrix.rows() << " rows\n";
  AblationOptions ao;
  ao.rhat_gate = c.rhat_gate;
  const auto result = ablate(matrix, detail::model_spec(c, predictors), c.sampler, ao);

  std::ostringstream txt;
  render_comparison(txt, result.table);
  std::size_t flagged = 0;
  for (const auto& r : result.table.rows) flagged += r.flagged ? 1 : 0;
  if (flagged > 0)
    txt << "WARNING: " << flagged << " model(s) exceeded the r_hat gate of "
        << fixed(c.rhat_gate, 2) << "\n";
  log << txt.str();
  detail::prepare_out_dir(c);
  if (c.wants("txt")) detail::emit(c, "ablate", stem + ".txt", txt.str(), log);
  if (c.wants("csv")) {
    std::ostringstream csv;
    write_comparison_csv(csv, result.table);
    detail::emit(c, "ablate", stem + ".csv", csv.str(), log);
  }
  return kOk;
}

/// Preference tallies and quality-score comparisons.
inline int cmd_report(const RunConfig& c, std::ostream& log) {
  detail::require_file(c.triples, "triples");
  detail::require_file(c.judgments, "judgments");
  const Dataset ds = ingest(c.judgments, c.triples, c.ptb_options());

  std::ostringstream txt, csv;
  csv << "table,question,first,first_share,second,second_share,not_sure,not_sure_share,total\n";
  struct TallySpec {
    const char* table;
    const char* label;
    Question q;
    Origin origin;
  };
  const TallySpec tallies[] = {
      {"preference_vs_source_bart", "<S, BART-A>", Question::s_vs_a, Origin::bart},
      {"preference_vs_source_bart", "<S, HUM-B>", Question::s_vs_b, Origin::bart},
      {"preference_vs_source_human", "<S, HUM-A>", Question::s_vs_a, Origin::human},
      {"preference_vs_source_human", "<S, HUM-B>", Question::s_vs_b, Origin::human},
      {"two_vs_three_bart", "<BART-A, HUM-B>", Question::a_vs_b, Origin::bart},
      {"two_vs_three_human", "<HUM-A, HUM-B>", Question::a_vs_b, Origin::human},
  };
  txt << "Preference tallies: first | second | not sure | total\n\n";
  for (const auto& t : tallies) {
    const auto js = judgments_for(ds, t.q, t.origin);
    const auto tl = tally(js, t.q);
    if (tl.total == 0) {
      txt << t.label << "  (no judgments; table omitted)\n";
      continue;
    }
    txt << t.label << "  " << tally_row(tl) << '\n';
    csv << t.table << ',' << csv_field(t.label) << ',' << tl.count(Choice::first) << ','
        << fixed(tl.share(Choice::first), 2) << ',' << tl.count(Choice::second) << ','
        << fixed(tl.share(Choice::second), 2) << ',' << tl.count(Choice::not_sure) << ','
        << fixed(tl.share(Choice::not_sure), 2) << ',' << tl.total << '\n';
  }

  struct ScoreSpec {
    const char* first;
    const char* second;
    Origin origin;
  };
  const ScoreSpec scores[] = {{"HUM-A", "HUM-B", Origin::human}, {"BART-A", "HUM-B", Origin::bart}};
  std::ostringstream scsv;
  scsv << "comparison,category,mean_first,sd_first,mean_second,sd_second,t,df,p\n";
  for (const auto& s : scores) {
    txt << "\nQuality scores: " << s.first << " vs " << s.second << "\n";
    const auto first = collect_scores(ds, s.origin, SideId::a, c.score_unit);
    const auto second = collect_scores(ds, s.origin, SideId::b, c.score_unit);
    if (first.fluency.size() < 2 || second.fluency.size() < 2) {
      txt << "(fewer than two observations; table omitted)\n";
      continue;
    }
    const auto rows = score_summary(first, second);
    render_score_table(txt, s.first, s.second, rows);
    for (const auto& r : rows)
      scsv << s.first << "_vs_" << s.second << ',' << r.category << ',' << exact(r.mean_first)
           << ',' << exact(r.sd_first) << ',' << exact(r.mean_second) << ','
           << exact(r.sd_second) << ',' << exact(r.test.t) << ',' << exact(r.test.df) << ','
           << exact(r.test.p) << '\n';
  }
  log << txt.str();
  detail::prepare_out_dir(c);
  if (c.wants("txt")) detail::emit(c, "report", "report.txt", txt.str(), log);
  if (c.wants("csv")) {
    detail::emit(c, "report", "tallies.csv", csv.str(), log);
    detail::emit(c, "report", "scores.csv", scsv.str(), log);
  }
  return kOk;
}

/// Maps exceptions to the documented exit codes.
template <typename Fn>
int run_guarded(Fn&& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  }
}

}  // namespace splitbench
