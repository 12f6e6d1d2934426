#include "netgame/report.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json_io.h"
#include "netgame/errors.h"

namespace netgame {

using json_io::Field;
using json_io::Json;

namespace {

Json gains_to_json(const AgentGains& g) {
  return Json{{"R_sym", json_io::matrix_to_json(g.r_sym)},
              {"L", json_io::matrix_to_json(g.l)},
              {"G1", json_io::matrix_to_json(g.im.g1)},
              {"G2", json_io::matrix_to_json(g.im.g2)},
              {"im_order", g.im.order},
              {"im_copies", g.im.copies},
              {"K1", json_io::matrix_to_json(g.k1)},
              {"K2", json_io::matrix_to_json(g.k2)},
              {"observer_abscissa", g.observer_abscissa},
              {"augmented_abscissa", g.augmented_abscissa}};
}

AgentGains gains_from_json(const Field& f) {
  AgentGains g;
  g.r_sym = f.at("R_sym").matrix();
  g.l = f.at("L").matrix();
  g.im.g1 = f.at("G1").matrix();
  g.im.g2 = f.at("G2").matrix();
  g.im.order = f.at("im_order").integer();
  g.im.copies = f.at("im_copies").integer();
  if (g.im.order * g.im.copies != g.im.g1.rows()) f.at("G1").fail("size differs from order x copies");
  g.k1 = f.at("K1").matrix();
  g.k2 = f.at("K2").matrix();
  g.observer_abscissa = f.at("observer_abscissa").number();
  g.augmented_abscissa = f.at("augmented_abscissa").number();
  return g;
}

void expect_square(const Field& f, const Matrix& m, Eigen::Index n) {
  if (m.rows() != n || m.cols() != n) f.fail("expected a " + std::to_string(n) + "x" +
                                             std::to_string(n) + " matrix");
}

Json optional_number(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string serialize_controllers(const ControllerFile& file) {
  Json agents = Json::array();
  for (std::size_t i = 0; i < file.controllers.size(); ++i) {
    const Controller& c = file.controllers[i];
    Json a{{"agent", i + 1}, {"gains", gains_to_json(gains_of(c))}};
    if (const auto* d = std::get_if<ControllerDigraph>(&c)) {
      a["M1"] = json_io::matrix_to_json(d->m1);
      a["M2"] = json_io::matrix_to_json(d->m2);
      a["K"] = json_io::matrix_to_json(d->k);
    } else {
      const auto& g = std::get<ControllerGeneral>(c);
      a["A"] = json_io::matrix_to_json(g.a);
      a["B"] = json_io::matrix_to_json(g.b);
      a["C"] = json_io::matrix_to_json(g.c);
    }
    agents.push_back(std::move(a));
  }
  const ControllerCertificates& cert = file.certificates;
  const Json doc{
      {"format", "netgame-controllers"},
      {"version", 1},
      {"scenario_hash", file.scenario_hash},
      {"strategy", std::string(to_string(file.strategy))},
      {"synthesis",
       Json{{"observer", Json{{"q", file.synthesis.observer.q}, {"r", file.synthesis.observer.r}}},
            {"stabilizer", Json{{"q_state", file.synthesis.stabilizer.q_state},
                                {"q_internal", file.synthesis.stabilizer.q_internal},
                                {"r", file.synthesis.stabilizer.r}}}}},
      {"agents", agents},
      {"certificates",
       Json{{"stable", cert.stable},
            {"abscissa", cert.abscissa},
            {"perturbed_abscissa", optional_number(cert.perturbed_abscissa)},
            {"regulator", Json{{"residual_dyn", cert.residual_dyn},
                               {"residual_err", cert.residual_err},
                               {"relative_dyn", cert.relative_dyn},
                               {"relative_err", cert.relative_err},
                               {"certified", cert.regulator_certified}}},
            {"steady_state_ne_gap", cert.steady_state_ne_gap},
            {"y_star", json_io::vector_to_json(cert.y_star)}}},
  };
  return json_io::dump(doc);
}

ControllerFile parse_controllers(std::string_view text) {
  const Json doc = json_io::parse_text(text);
  const Field root(doc, "");
  if (root.at("format").string() != "netgame-controllers") {
    root.at("format").fail("not a controller file");
  }
  if (root.at("version").integer() != 1) root.at("version").fail("unsupported version");
  ControllerFile file;
  file.scenario_hash = root.at("scenario_hash").string();
  const Field fs = root.at("strategy");
  try {
    file.strategy = parse_strategy(fs.string());
  } catch (const DomainError&) {
    fs.fail("strategy must be \"digraph\" or \"general\"");
  }
  const Field syn = root.at("synthesis");
  file.synthesis.observer.q = syn.at("observer").at("q").number();
  file.synthesis.observer.r = syn.at("observer").at("r").number();
  file.synthesis.stabilizer.q_state = syn.at("stabilizer").at("q_state").number();
  file.synthesis.stabilizer.q_internal = syn.at("stabilizer").at("q_internal").number();
  file.synthesis.stabilizer.r = syn.at("stabilizer").at("r").number();

  const Field agents = root.at("agents");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const Field a = agents.at(i);
    if (a.at("agent").integer() != static_cast<long long>(i + 1)) {
      a.at("agent").fail("agents must be listed in order 1..N");
    }
    AgentGains g = gains_from_json(a.at("gains"));
    if (file.strategy == StrategyKind::kDigraph) {
      ControllerDigraph d;
      d.m1 = a.at("M1").matrix();
      d.m2 = a.at("M2").matrix();
      d.k = a.at("K").matrix();
      expect_square(a.at("M1"), d.m1, d.m1.rows());
      if (d.m2.rows() != d.m1.rows() || d.k.cols() != d.m1.rows()) {
        a.fail("M1, M2 and K dimensions disagree");
      }
      d.gains = std::move(g);
      file.controllers.emplace_back(std::move(d));
    } else {
      ControllerGeneral c;
      c.a = a.at("A").matrix();
      c.b = a.at("B").matrix();
      c.c = a.at("C").matrix();
      expect_square(a.at("A"), c.a, c.a.rows());
      if (c.b.rows() != c.a.rows() || c.c.cols() != c.a.rows()) {
        a.fail("A, B and C dimensions disagree");
      }
      c.gains = std::move(g);
      file.controllers.emplace_back(std::move(c));
    }
  }

  const Field cert = root.at("certificates");
  ControllerCertificates& out = file.certificates;
  out.stable = cert.at("stable").boolean();
  out.abscissa = cert.at("abscissa").number();
  const Field pa = cert.at("perturbed_abscissa");
  if (!pa.value().is_null()) out.perturbed_abscissa = pa.number();
  const Field reg = cert.at("regulator");
  out.residual_dyn = reg.at("residual_dyn").number();
  out.residual_err = reg.at("residual_err").number();
  out.relative_dyn = reg.at("relative_dyn").number();
  out.relative_err = reg.at("relative_err").number();
  out.regulator_certified = reg.at("certified").boolean();
  out.steady_state_ne_gap = cert.at("steady_state_ne_gap").number();
  out.y_star = cert.at("y_star").vector();
  return file;
}

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), end);
}

std::string csv_header(const std::vector<AgentDims>& dims) {
  std::string h = "t";
  const auto block = [&](const char* prefix, Eigen::Index AgentDims::*field) {
    for (std::size_t i = 0; i < dims.size(); ++i) {
      for (Eigen::Index k = 0; k < dims[i].*field; ++k) {
        h += ",";
        h += prefix;
        h += "_" + std::to_string(i + 1) + "_" + std::to_string(k + 1);
      }
    }
  };
  block("y", &AgentDims::y);
  block("e", &AgentDims::y);
  block("w", &AgentDims::w);
  return h;
}

void write_csv(std::ostream& out, const Trajectory& tr) {
  out << csv_header(tr.dims) << "\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    std::string row = format_double(tr.times[k]);
    for (const Vector* v : {&tr.y[k], &tr.e[k], &tr.w[k]}) {
      for (Eigen::Index c = 0; c < v->size(); ++c) {
        row += ",";
        row += format_double((*v)(c));
      }
    }
    out << row << "\n";
  }
}

std::string render_svg_plot(const std::string& title, const std::string& y_label,
                            const std::vector<double>& times,
                            const std::vector<PlotSeries>& series) {
  constexpr double kWidth = 800, kHeight = 500;
  constexpr double kLeft = 80, kRight = 150, kTop = 40, kBottom = 50;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;

  double t0 = times.empty() ? 0.0 : times.front();
  double t1 = times.empty() ? 1.0 : times.back();
  if (t1 <= t0) t1 = t0 + 1.0;
  double lo = 0.0, hi = 0.0;
  for (const PlotSeries& s : series) {
    for (double v : s.values) {
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (hi <= lo) hi = lo + 1.0;
  const auto sx = [&](double t) { return kLeft + (t - t0) / (t1 - t0) * pw; };
  const auto sy = [&](double v) { return kTop + (hi - v) / (hi - lo) * ph; };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
        "viewBox=\"0 0 800 500\">\n"
     << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n"
     << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"16\">" << escape_xml(title) << "</text>\n"
     << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double t = t0 + (t1 - t0) * k / 5.0;
    const double v = lo + (hi - lo) * k / 5.0;
    os << "<text x=\"" << sx(t) << "\" y=\"" << kTop + ph + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
       << format_double(std::round(t * 1000.0) / 1000.0) << "</text>\n"
       << "<text x=\"" << kLeft - 6 << "\" y=\"" << sy(v) + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << format_double(std::round(v * 1000.0) / 1000.0) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">t [s]</text>\n"
     << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 18 "
     << kTop + ph / 2 << ")\">" << escape_xml(y_label) << "</text>\n";

  // At most ~1000 vertices per polyline.
  const std::size_t stride = std::max<std::size_t>(1, times.size() / 1000);
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % 8];
    const bool dashed = s % 2 == 1;
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
       << (dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    for (std::size_t k = 0; k < times.size(); k += stride) {
      if (k >= series[s].values.size() || !std::isfinite(series[s].values[k])) continue;
      os << sx(times[k]) << "," << sy(series[s].values[k]) << " ";
    }
    if (!times.empty() && (times.size() - 1) % stride != 0 &&
        times.size() <= series[s].values.size()) {
      os << sx(times.back()) << "," << sy(series[s].values[times.size() - 1]);
    }
    os << "\"/>\n";
    const double ly = kTop + 16 + 18.0 * static_cast<double>(s);
    os << "<line x1=\"" << kWidth - kRight + 15 << "\" y1=\"" << ly << "\" x2=\""
       << kWidth - kRight + 45 << "\" y2=\"" << ly << "\" stroke=\"" << color
       << "\" stroke-width=\"1.5\"" << (dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n"
       << "<text x=\"" << kWidth - kRight + 50 << "\" y=\"" << ly + 4
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape_xml(series[s].label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::pair<std::filesystem::path, std::filesystem::path> write_svg_plots(
    const Trajectory& tr, const std::filesystem::path& svg_path) {
  const std::filesystem::path dir = svg_path.parent_path();
  const std::string stem = svg_path.stem().string();
  const std::filesystem::path gap_path = dir / (stem + "_gap.svg");
  const std::filesystem::path err_path = dir / (stem + "_error.svg");

  std::vector<PlotSeries> gap, err;
  const bool have_ne = tr.y_star.size() > 0;
  for (AgentIndex i = 0; i < tr.dims.size(); ++i) {
    PlotSeries g{"agent " + std::to_string(i + 1), {}};
    PlotSeries e{"agent " + std::to_string(i + 1), {}};
    const Eigen::Index off = tr.offset(i, &AgentDims::y);
    const Eigen::Index p = tr.dims[i].y;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      if (have_ne) {
        g.values.push_back((tr.y[k].segment(off, p) - tr.y_star.segment(off, p)).norm());
      }
      e.values.push_back(tr.e[k].segment(off, p).norm());
    }
    gap.push_back(std::move(g));
    err.push_back(std::move(e));
  }
  const auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
  };
  write(gap_path, render_svg_plot("Output gap to the Nash equilibrium", "|y_i - y_i*|",
                                  tr.times, gap));
  write(err_path, render_svg_plot("Regulated error", "|e_i|", tr.times, err));
  return {gap_path, err_path};
}

}  // namespace netgame
