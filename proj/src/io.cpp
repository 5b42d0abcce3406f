#include "marginopt/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "marginopt/errors.hpp"
#include "marginopt/rng.hpp"

namespace marginopt::io {

namespace {

using nlohmann::ordered_json;

std::string fingerprint_hex(std::uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fp));
  return std::string(buf);
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path.string());
  out << contents;
  if (!out) throw Error("write failed: " + path.string());
}

std::string stats_to_json(const data::AssetStats& stats) {
  ordered_json doc;
  doc["tickers"] = stats.tickers;
  doc["sample_count"] = stats.sample_count;
  doc["r"] = stats.r;
  doc["S"] = stats.S.entries();
  return doc.dump(2) + "\n";
}

data::AssetStats stats_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("stats json: parse error: ") + e.what());
  }
  data::AssetStats stats;
  try {
    stats.tickers = doc.at("tickers").get<std::vector<std::string>>();
    stats.sample_count = doc.at("sample_count").get<std::size_t>();
    stats.r = doc.at("r").get<std::vector<double>>();
    auto flat = doc.at("S").get<std::vector<double>>();
    const std::size_t n = stats.tickers.size();
    if (stats.r.size() != n || flat.size() != n * n) {
      throw ValidationError("stats json: inconsistent dimensions");
    }
    stats.S = linalg::RealMatrix(n, n, std::move(flat));
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw ValidationError(std::string("stats json: bad structure: ") + e.what());
  }
  return stats;
}

std::string frontier_csv(const frontier::FrontierSet& fs,
                         std::size_t n_assets) {
  std::ostringstream out;
  out << "lambda,mu_re,mu_im,kind,s,rho,sharpe,accepted";
  for (std::size_t i = 1; i <= n_assets; ++i) out << ",weight_" << i;
  out << "\n";
  for (const auto& rec : fs.records) {
    out << format_double(rec.lambda) << ',' << format_double(rec.mu.real())
        << ',' << format_double(rec.mu.imag()) << ','
        << frontier::record_kind_name(rec.kind) << ','
        << format_double(rec.risk) << ',' << format_double(rec.ret) << ','
        << format_double(rec.sharpe) << ",1";
    for (double w : rec.weights) out << ',' << format_double(w);
    out << "\n";
  }
  return out.str();
}

std::string summary_json(const frontier::FrontierSet& fs,
                         const solver::SolverConfig& cfg,
                         const data::AssetStats& stats) {
  ordered_json doc;
  doc["assets"] = stats.size();
  doc["tickers"] = stats.tickers;
  doc["lambda_steps"] = cfg.lambda_steps;
  doc["gamma"] = cfg.gamma;
  doc["wealth"] = cfg.wealth;
  doc["norm_budget"] = cfg.norm_budget();
  doc["stats_fingerprint"] = fingerprint_hex(fs.stats_fingerprint);

  ordered_json census;
  census["interior"] = fs.diagnostics.interior_eigenvalues;
  census["endpoints"] = fs.diagnostics.endpoint_candidates;
  census["total"] = fs.diagnostics.eigenvalues_examined();
  doc["eigenvalues_examined"] = census;

  ordered_json counts;
  counts["records"] = fs.records.size();
  counts["accepted_real"] = fs.diagnostics.accepted_real;
  counts["accepted_complex"] = fs.diagnostics.accepted_complex;
  counts["spurious"] = fs.diagnostics.spurious;
  counts["lambdas_without_solutions"] =
      fs.diagnostics.lambdas_without_solutions;
  doc["counts"] = counts;

  if (fs.max_sharpe_index) {
    const auto& best = fs.records[*fs.max_sharpe_index];
    ordered_json sp;
    sp["lambda"] = best.lambda;
    sp["mu_re"] = best.mu.real();
    sp["mu_im"] = best.mu.imag();
    sp["kind"] = frontier::record_kind_name(best.kind);
    sp["risk"] = best.risk;
    sp["return"] = best.ret;
    sp["sharpe"] = best.sharpe;
    sp["weights"] = best.weights;
    doc["max_sharpe"] = sp;
  } else {
    doc["max_sharpe"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

std::string multiplicity_csv(const orthant::MultiplicityReport& report) {
  std::ostringstream out;
  out << "N,count,log_count,seed\n";
  for (const auto& row : report.per_n) {
    out << row.n_assets << ',' << row.optima_count << ','
        << format_double(row.log_count) << ',' << report.instance_seed << "\n";
  }
  return out.str();
}

namespace {

struct SvgMapper {
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  double width = 800.0, height = 600.0;
  double left = 70.0, right = 25.0, top = 30.0, bottom = 55.0;

  void expand(double x, double y) {
    x_lo = std::min(x_lo, x);
    x_hi = std::max(x_hi, x);
    y_lo = std::min(y_lo, y);
    y_hi = std::max(y_hi, y);
  }

  void pad() {
    const double dx = (x_hi - x_lo) > 0 ? 0.05 * (x_hi - x_lo) : 1.0;
    const double dy = (y_hi - y_lo) > 0 ? 0.05 * (y_hi - y_lo) : 1.0;
    x_lo -= dx;
    x_hi += dx;
    y_lo -= dy;
    y_hi += dy;
  }

  double px(double x) const {
    return left + (x - x_lo) / (x_hi - x_lo) * (width - left - right);
  }
  double py(double y) const {
    return height - bottom - (y - y_lo) / (y_hi - y_lo) * (height - top - bottom);
  }
};

std::string svg_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return std::string(buf);
}

std::string svg_tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return std::string(buf);
}

void svg_header(std::ostringstream& out, const SvgMapper& m,
                const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << m.width
      << "\" height=\"" << m.height << "\" viewBox=\"0 0 " << m.width << " "
      << m.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << svg_coord(m.width / 2) << "\" y=\"20\" "
      << "text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";

  // Axes.
  out << "<line x1=\"" << svg_coord(m.left) << "\" y1=\""
      << svg_coord(m.height - m.bottom) << "\" x2=\""
      << svg_coord(m.width - m.right) << "\" y2=\""
      << svg_coord(m.height - m.bottom) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << svg_coord(m.left) << "\" y1=\"" << svg_coord(m.top)
      << "\" x2=\"" << svg_coord(m.left) << "\" y2=\""
      << svg_coord(m.height - m.bottom) << "\" stroke=\"black\"/>\n";

  for (int t = 0; t <= 5; ++t) {
    const double fx = m.x_lo + (m.x_hi - m.x_lo) * t / 5.0;
    const double fy = m.y_lo + (m.y_hi - m.y_lo) * t / 5.0;
    const double xx = m.px(fx);
    const double yy = m.py(fy);
    out << "<line x1=\"" << svg_coord(xx) << "\" y1=\""
        << svg_coord(m.height - m.bottom) << "\" x2=\"" << svg_coord(xx)
        << "\" y2=\"" << svg_coord(m.height - m.bottom + 5) << "\" "
        << "stroke=\"black\"/>\n";
    out << "<text x=\"" << svg_coord(xx) << "\" y=\""
        << svg_coord(m.height - m.bottom + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"10\">" << svg_tick_label(fx) << "</text>\n";
    out << "<line x1=\"" << svg_coord(m.left - 5) << "\" y1=\""
        << svg_coord(yy) << "\" x2=\"" << svg_coord(m.left) << "\" y2=\""
        << svg_coord(yy) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << svg_coord(m.left - 8) << "\" y=\""
        << svg_coord(yy + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"10\">" << svg_tick_label(fy) << "</text>\n";
  }
  out << "<text x=\"" << svg_coord((m.left + m.width - m.right) / 2)
      << "\" y=\"" << svg_coord(m.height - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\">risk s</text>\n";
  out << "<text x=\"18\" y=\"" << svg_coord((m.top + m.height - m.bottom) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\" transform=\"rotate(-90 18 "
      << svg_coord((m.top + m.height - m.bottom) / 2)
      << ")\">return rho</text>\n";
}

void svg_point(std::ostringstream& out, const SvgMapper& m, double x, double y,
               const char* color, const char* cls) {
  out << "<circle class=\"" << cls << "\" cx=\"" << svg_coord(m.px(x))
      << "\" cy=\"" << svg_coord(m.py(y)) << "\" r=\"1.8\" fill=\"" << color
      << "\" fill-opacity=\"0.55\"/>\n";
}

void svg_asset_points(std::ostringstream& out, const SvgMapper& m,
                      const data::AssetStats& stats) {
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const double s = std::sqrt(std::max(0.0, stats.S(i, i)));
    const double rho = std::abs(stats.r[i]);
    out << "<rect class=\"asset\" x=\"" << svg_coord(m.px(s) - 3) << "\" y=\""
        << svg_coord(m.py(rho) - 3)
        << "\" width=\"6\" height=\"6\" fill=\"black\"/>\n";
    out << "<text x=\"" << svg_coord(m.px(s) + 5) << "\" y=\""
        << svg_coord(m.py(rho) + 3)
        << "\" font-family=\"sans-serif\" font-size=\"9\">" << stats.tickers[i]
        << "</text>\n";
  }
}

void svg_sp_marker(std::ostringstream& out, const SvgMapper& m,
                   const frontier::PortfolioRecord& best) {
  const double x = m.px(best.risk);
  const double y = m.py(best.ret);
  out << "<circle class=\"sp\" cx=\"" << svg_coord(x) << "\" cy=\""
      << svg_coord(y)
      << "\" r=\"6\" fill=\"gold\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  out << "<text x=\"" << svg_coord(x + 9) << "\" y=\"" << svg_coord(y - 6)
      << "\" font-family=\"sans-serif\" font-size=\"13\" "
      << "font-weight=\"bold\">SP</text>\n";
}

}  // namespace

std::string figure_complex_svg(const frontier::FrontierSet& fs,
                               const data::AssetStats& stats) {
  SvgMapper m;
  bool first = true;
  auto seed_range = [&](double x, double y) {
    if (first) {
      m.x_lo = m.x_hi = x;
      m.y_lo = m.y_hi = y;
      first = false;
    } else {
      m.expand(x, y);
    }
  };
  for (const auto& rec : fs.records) seed_range(rec.risk, rec.ret);
  for (std::size_t i = 0; i < stats.size(); ++i) {
    seed_range(std::sqrt(std::max(0.0, stats.S(i, i))), std::abs(stats.r[i]));
  }
  if (first) seed_range(0.0, 0.0);
  m.pad();

  std::ostringstream out;
  svg_header(out, m,
             "Solution cloud (blue = real contributions, red = imaginary)");
  for (const auto& rec : fs.records) {
    const bool imag = rec.kind == frontier::RecordKind::kImagPart;
    svg_point(out, m, rec.risk, rec.ret, imag ? "#d62728" : "#1f77b4",
              imag ? "imag-part" : "real-part");
  }
  svg_asset_points(out, m, stats);
  if (fs.max_sharpe_index) {
    svg_sp_marker(out, m, fs.records[*fs.max_sharpe_index]);
  }
  out << "</svg>\n";
  return out.str();
}

std::string figure_real_svg(const frontier::FrontierSet& fs,
                            const data::AssetStats& stats) {
  SvgMapper m;
  bool first = true;
  for (const auto& rec : fs.records) {
    if (rec.kind != frontier::RecordKind::kReal) continue;
    if (first) {
      m.x_lo = m.x_hi = rec.risk;
      m.y_lo = m.y_hi = rec.ret;
      first = false;
    } else {
      m.expand(rec.risk, rec.ret);
    }
  }
  if (first) {
    m.x_lo = m.y_lo = 0.0;
    m.x_hi = m.y_hi = 1.0;
  }
  m.pad();

  std::ostringstream out;
  svg_header(out, m, "Real solutions");
  for (const auto& rec : fs.records) {
    if (rec.kind != frontier::RecordKind::kReal) continue;
    svg_point(out, m, rec.risk, rec.ret, "#1f77b4", "real");
  }
  if (fs.max_sharpe_index) {
    svg_sp_marker(out, m, fs.records[*fs.max_sharpe_index]);
  }
  out << "</svg>\n";
  return out.str();
}

std::string synthetic_prices_csv(std::size_t assets, std::size_t days,
                                 std::uint64_t seed) {
  if (assets == 0 || days < 3) {
    throw ValidationError("synthetic_prices_csv: need assets >= 1, days >= 3");
  }
  rng::Rng gen(seed);

  std::vector<double> price(assets);
  std::vector<double> drift(assets);
  std::vector<double> vol(assets);
  std::vector<double> load(assets);  // loading on the common shock
  for (std::size_t i = 0; i < assets; ++i) {
    price[i] = gen.uniform(20.0, 200.0);
    drift[i] = gen.uniform(-0.0005, 0.0015);
    vol[i] = gen.uniform(0.005, 0.025);
    load[i] = gen.uniform(0.2, 0.7);
  }

  std::size_t ticker_width = 1;
  for (std::size_t v = assets; v >= 10; v /= 10) ++ticker_width;
  std::size_t day_width = 1;
  for (std::size_t v = days; v >= 10; v /= 10) ++day_width;
  const auto padded = [](char prefix, std::size_t value, std::size_t width) {
    std::string digits = std::to_string(value);
    std::string out(1, prefix);
    out.append(width > digits.size() ? width - digits.size() : 0, '0');
    return out + digits;
  };

  std::ostringstream out;
  out << "date";
  for (std::size_t i = 0; i < assets; ++i) {
    out << ',' << padded('A', i + 1, ticker_width);
  }
  out << "\n";

  for (std::size_t t = 0; t < days; ++t) {
    out << padded('d', t + 1, day_width);
    for (std::size_t i = 0; i < assets; ++i) {
      out << ',' << format_double(price[i]);
    }
    out << "\n";
    const double common = gen.normal();
    for (std::size_t i = 0; i < assets; ++i) {
      const double own = gen.normal();
      const double shock = load[i] * common +
                           std::sqrt(1.0 - load[i] * load[i]) * own;
      double factor = 1.0 + drift[i] + vol[i] * shock;
      if (factor < 0.01) factor = 0.01;
      price[i] *= factor;
    }
  }
  return out.str();
}

}  // namespace marginopt::io
