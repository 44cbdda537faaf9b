#pragma once

// Plain-text and CSV rendering of tallies, score summaries, posterior
// summaries and WAIC comparison tables.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "splitbench/descriptive.hpp"
#include "splitbench/error.hpp"
#include "splitbench/inference.hpp"
#include "splitbench/selection.hpp"

namespace splitbench {

inline std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  std::string s(buf);
  if (s == "-0.00" || s == "-0.000" || s == "-0.0") s.erase(0, 1);
  return s;
}

/// Shortest representation that reads back to the same double.
inline std::string exact(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Left-aligned first column, right-aligned others.
class TextTable {
public:
  explicit TextTable(std::vector<std::string> header) { rows_.push_back(std::move(header)); }

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void render(std::ostream& os) const {
    std::vector<std::size_t> width;
    for (const auto& r : rows_) {
      if (width.size() < r.size()) width.resize(r.size(), 0);
      for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const auto& r = rows_[i];
      std::string line;
      for (std::size_t c = 0; c < r.size(); ++c) {
        const std::string pad(width[c] - r[c].size(), ' ');
        if (c > 0) line += "  ";
        line += c == 0 ? r[c] + pad : pad + r[c];
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      os << line << '\n';
      if (i == 0) {
        std::size_t total = 0;
        for (auto w : width) total += w;
        os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
      }
    }
  }

private:
  std::vector<std::vector<std::string>> rows_;
};

/// "count (share)" with a two-decimal share.
inline std::string count_share(std::size_t count, double share) {
  return std::to_string(count) + " (" + fixed(share, 2) + ")";
}

/// One tally row in the layout "first | second | not_sure | total".
inline std::string tally_row(const Tally& t) {
  return count_share(t.count(Choice::first), t.share(Choice::first)) + " | " +
         count_share(t.count(Choice::second), t.share(Choice::second)) + " | " +
         count_share(t.count(Choice::not_sure), t.share(Choice::not_sure)) + " | " +
         std::to_string(t.total);
}

/// "4.04 (0.39)"
inline std::string mean_sd(double mean, double sd) {
  return fixed(mean, 2) + " (" + fixed(sd, 2) + ")";
}

inline std::string significance_marker(double p) {
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

inline void render_score_table(std::ostream& os, const std::string& first_label,
                               const std::string& second_label,
                               const std::vector<CategorySummary>& rows) {
  TextTable t({"category", first_label, second_label, "t", "p"});
  for (const auto& r : rows) {
    t.add({significance_marker(r.test.p) + r.category, mean_sd(r.mean_first, r.sd_first),
           mean_sd(r.mean_second, r.sd_second), fixed(r.test.t, 4), fixed(r.test.p, 4)});
  }
  t.render(os);
  os << "** = p < 0.01, * = p < 0.05 (two-sided Welch t-test)\n";
}

inline void render_comparison(std::ostream& os, const ComparisonTable& table) {
  TextTable t({"predictor", "rank", "waic", "p_waic", "d_waic", "se", "dse", "flag"});
  for (const auto& r : table.rows) {
    t.add({r.name, std::to_string(r.rank), fixed(r.waic, 3), fixed(r.p_waic, 3),
           fixed(r.d_waic, 3), fixed(r.se, 3), fixed(r.dse, 3),
           r.flagged ? "rhat>" + fixed(r.max_rhat, 3) : ""});
  }
  t.render(os);
}

inline void write_comparison_csv(std::ostream& os, const ComparisonTable& table) {
  os << "predictor,rank,waic,p_waic,d_waic,se,dse,max_rhat,flagged\n";
  for (const auto& r : table.rows) {
    os << csv_field(r.name) << ',' << r.rank << ',' << exact(r.waic) << ',' << exact(r.p_waic)
       << ',' << exact(r.d_waic) << ',' << exact(r.se) << ',' << exact(r.dse) << ','
       << exact(r.max_rhat) << ',' << (r.flagged ? 1 : 0) << '\n';
  }
}

inline void render_posterior_summary(std::ostream& os,
                                     const std::vector<CoefficientSummary>& summary) {
  TextTable t({"coefficient", "mean", "sd", "hdi_3%", "hdi_97%", "r_hat"});
  for (const auto& s : summary)
    t.add({s.name, fixed(s.mean, 3), fixed(s.sd, 3), fixed(s.hdi_low, 3), fixed(s.hdi_high, 3),
           s.rhat ? fixed(*s.rhat, 3) : "undefined"});
  t.render(os);
}

inline void write_summary_csv(std::ostream& os, const std::vector<CoefficientSummary>& summary) {
  os << "coefficient,mean,sd,hdi_3%,hdi_97%,r_hat\n";
  for (const auto& s : summary)
    os << csv_field(s.name) << ',' << exact(s.mean) << ',' << exact(s.sd) << ','
       << exact(s.hdi_low) << ',' << exact(s.hdi_high) << ',' << (s.rhat ? exact(*s.rhat) : "")
       << '\n';
}

inline void write_histograms_csv(std::ostream& os,
                                 const std::vector<CoefficientSummary>& summary) {
  os << "coefficient,bin,lower,upper,count\n";
  for (const auto& s : summary) {
    const auto& h = s.histogram;
    for (std::size_t b = 0; b < h.counts.size(); ++b)
      os << csv_field(s.name) << ',' << b << ',' << exact(h.edges[b]) << ','
         << exact(h.edges[b + 1]) << ',' << h.counts[b] << '\n';
  }
}

/// Writes `contents` to a sibling temporary file, then renames it over
/// `path`.
inline void write_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace splitbench
