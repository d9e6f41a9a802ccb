#pragma once

// (p, omega) region sweeps and their CSV/JSON serialisation.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "dpower/criteria.hpp"
#include "dpower/detail/parallel.hpp"
#include "dpower/nonlinearity.hpp"
#include "dpower/shooting.hpp"

namespace dpower {

struct SweepCell {
  double p = 0.0;
  double omega = 0.0;
  double omega_p = 0.0;
  double a_p = 0.0;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> b;
  std::optional<double> c;
  Classification classification = Classification::NoSolution;
  std::optional<double> k_alpha;

  friend bool operator==(const SweepCell&, const SweepCell&) = default;
};

inline constexpr std::string_view kSweepCsvHeader =
    "p,omega,omega_p,a_p,alpha,beta,b,c,classification,k_alpha";

inline SweepCell make_cell(double p, double omega) {
  const CriterionReport r = classify(Params(1, p, omega));
  SweepCell cell;
  cell.p = p;
  cell.omega = omega;
  cell.omega_p = r.points.omega_p;
  cell.a_p = r.points.a_p;
  cell.alpha = r.points.alpha;
  cell.beta = r.points.beta;
  cell.b = r.points.b;
  cell.c = r.points.c;
  cell.classification = r.classification;
  cell.k_alpha = r.k_alpha;
  return cell;
}

struct SweepGrid {
  double p_min = 0.0;
  double p_max = 0.0;
  std::size_t p_steps = 0;
  std::size_t omega_steps = 0;
};

inline void validate(const SweepGrid& g) {
  if (!(g.p_min > kMinExponent) || !std::isfinite(g.p_max) || !(g.p_max > g.p_min))
    throw DomainError("sweep: need 1 < p_min < p_max");
  if (g.p_steps < 2 || g.omega_steps < 2) throw DomainError("sweep: steps must be >= 2");
}

/// Cells ordered by (p, omega). p runs over p_steps points of [p_min, p_max]; for each p,
/// omega takes omega_steps equally spaced fractions of (0, omega_p(p)), both ends excluded.
inline std::vector<SweepCell> sweep(const SweepGrid& g) {
  validate(g);
  std::vector<SweepCell> cells(g.p_steps * g.omega_steps);
  detail::parallel_for(g.p_steps, [&](std::size_t i) {
    const double p = i + 1 == g.p_steps
                         ? g.p_max
                         : g.p_min + (g.p_max - g.p_min) * static_cast<double>(i) /
                                         static_cast<double>(g.p_steps - 1);
    const double wp = omega_p(p);
    for (std::size_t j = 0; j < g.omega_steps; ++j) {
      const double w = wp * static_cast<double>(j + 1) / static_cast<double>(g.omega_steps + 1);
      cells[i * g.omega_steps + j] = make_cell(p, w);
    }
  });
  return cells;
}

// ---- text formatting --------------------------------------------------------

/// Shortest-safe decimal: 17 significant digits, so doubles round-trip exactly.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

namespace detail {

inline std::string format_opt(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string{};
}

inline std::optional<double> parse_opt(std::string_view s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

} // namespace detail

inline std::string to_csv_row(const SweepCell& c) {
  std::string row;
  for (const std::string& field :
       {format_double(c.p), format_double(c.omega), format_double(c.omega_p),
        format_double(c.a_p), detail::format_opt(c.alpha), detail::format_opt(c.beta),
        detail::format_opt(c.b), detail::format_opt(c.c),
        std::string(to_string(c.classification)), detail::format_opt(c.k_alpha)}) {
    if (!row.empty()) row += ',';
    row += field;
  }
  return row;
}

inline std::string to_csv(const std::vector<SweepCell>& cells) {
  std::string out(kSweepCsvHeader);
  out += '\n';
  for (const SweepCell& c : cells) {
    out += to_csv_row(c);
    out += '\n';
  }
  return out;
}

inline SweepCell parse_csv_row(std::string_view row) {
  const auto f = detail::split(row, ',');
  if (f.size() != 10) throw std::invalid_argument("sweep csv: expected 10 fields");
  SweepCell c;
  c.p = parse_double(f[0]);
  c.omega = parse_double(f[1]);
  c.omega_p = parse_double(f[2]);
  c.a_p = parse_double(f[3]);
  c.alpha = detail::parse_opt(f[4]);
  c.beta = detail::parse_opt(f[5]);
  c.b = detail::parse_opt(f[6]);
  c.c = detail::parse_opt(f[7]);
  const auto cls = classification_from_string(f[8]);
  if (!cls) throw std::invalid_argument("sweep csv: unknown classification '" + std::string(f[8]) + "'");
  c.classification = *cls;
  c.k_alpha = detail::parse_opt(f[9]);
  return c;
}

inline std::vector<SweepCell> parse_csv(std::string_view text) {
  std::vector<SweepCell> cells;
  bool header = true;
  for (std::string_view line : detail::split(text, '\n')) {
    if (line.empty()) continue;
    if (header) {
      if (line != kSweepCsvHeader) throw std::invalid_argument("sweep csv: bad header");
      header = false;
      continue;
    }
    cells.push_back(parse_csv_row(line));
  }
  return cells;
}

namespace detail {

inline nlohmann::json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline std::optional<double> json_opt(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

} // namespace detail

inline nlohmann::json to_json(const SweepCell& c) {
  return {{"p", c.p},
          {"omega", c.omega},
          {"omega_p", c.omega_p},
          {"a_p", c.a_p},
          {"alpha", detail::opt_json(c.alpha)},
          {"beta", detail::opt_json(c.beta)},
          {"b", detail::opt_json(c.b)},
          {"c", detail::opt_json(c.c)},
          {"classification", std::string(to_string(c.classification))},
          {"k_alpha", detail::opt_json(c.k_alpha)}};
}

inline SweepCell sweep_cell_from_json(const nlohmann::json& j) {
  SweepCell c;
  c.p = j.at("p").get<double>();
  c.omega = j.at("omega").get<double>();
  c.omega_p = j.at("omega_p").get<double>();
  c.a_p = j.at("a_p").get<double>();
  c.alpha = detail::json_opt(j.at("alpha"));
  c.beta = detail::json_opt(j.at("beta"));
  c.b = detail::json_opt(j.at("b"));
  c.c = detail::json_opt(j.at("c"));
  const auto cls = classification_from_string(j.at("classification").get<std::string>());
  if (!cls) throw std::invalid_argument("sweep json: unknown classification");
  c.classification = *cls;
  c.k_alpha = detail::json_opt(j.at("k_alpha"));
  return c;
}

inline std::string to_json_text(const std::vector<SweepCell>& cells) {
  nlohmann::json arr = nlohmann::json::array();
  for (const SweepCell& c : cells) arr.push_back(to_json(c));
  return arr.dump(2) + "\n";
}

inline std::vector<SweepCell> parse_json_text(std::string_view text) {
  const nlohmann::json arr = nlohmann::json::parse(text);
  std::vector<SweepCell> cells;
  for (const auto& j : arr) cells.push_back(sweep_cell_from_json(j));
  return cells;
}

/// JSON object with every report and critical-point field; absent values are null.
inline nlohmann::json to_json(const CriterionReport& r) {
  auto opt_bool = [](const std::optional<bool>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"p", r.p},
          {"omega", r.omega},
          {"omega_p", r.points.omega_p},
          {"a_p", r.points.a_p},
          {"alpha", r.points.alpha},
          {"beta", detail::opt_json(r.points.beta)},
          {"b", detail::opt_json(r.points.b)},
          {"c", detail::opt_json(r.points.c)},
          {"exists", r.exists},
          {"h1_limit", r.h1_limit},
          {"h2_witness", detail::opt_json(r.h2_witness)},
          {"basic_holds", r.basic_holds},
          {"extended_holds", opt_bool(r.extended_holds)},
          {"k_alpha", detail::opt_json(r.k_alpha)},
          {"newton_point", detail::opt_json(r.newton_point)},
          {"k_grid_max", detail::opt_json(r.k_grid_max)},
          {"g_scan_monotone", r.g_scan_monotone},
          {"classification", std::string(to_string(r.classification))}};
}

// ---- profile export ---------------------------------------------------------

inline constexpr std::string_view kProfileCsvHeader = "r,u,du";

inline std::string profile_csv(const std::vector<Sample>& samples) {
  std::string out(kProfileCsvHeader);
  out += '\n';
  for (const Sample& s : samples) {
    out += format_double(s.r);
    out += ',';
    out += format_double(s.u);
    out += ',';
    out += format_double(s.du);
    out += '\n';
  }
  return out;
}

/// Writes to a sibling temporary and renames it into place, so a failed write
/// never leaves a partial file at `path`.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot move output into " + path.string());
  }
}

} // namespace dpower
