#include "reskit/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <limits>
#include <sstream>

namespace reskit {

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json interval_json(const Interval& iv) {
  return Json{{"lower", number_or_null(iv.lo)}, {"upper", number_or_null(iv.hi)}};
}

Json header_json(const DocumentHeader& h) {
  Json lost = Json::array();
  for (std::size_t i = 0; i < h.lost.size(); ++i)
    lost.push_back({{"index", h.lost[i] + 1}, {"label", i < h.lost_labels.size() ? h.lost_labels[i] : ""}});
  return Json{{"command", h.command}, {"generated_at", utc_timestamp()}, {"system", h.system}, {"lost_actuators", lost}};
}

Json tolerances_json(const Tolerances& t) {
  return Json{{"rank", t.rank},
              {"spectrum", t.spectrum},
              {"imag", t.imag},
              {"containment", t.containment},
              {"support", t.support}};
}

Json summary_json(const BoundsSummary& s) {
  return Json{{"source", s.source},
              {"pairs", s.pairs},
              {"T_N", interval_json(s.T_N)},
              {"T_M", interval_json(s.T_M)},
              {"r_q", {{"lower", s.rq_lower}, {"upper", s.rq_upper}, {"clamped", s.rq_clamped}}},
              {"best_pair_ids",
               {{"T_N_lower", s.T_N_lower_id},
                {"T_N_upper", s.T_N_upper_id},
                {"T_M_lower", s.T_M_lower_id},
                {"T_M_upper", s.T_M_upper_id},
                {"r_q_lower", s.rq_lower_id},
                {"r_q_upper", s.rq_upper_id}}}};
}

// Shortest decimal that reads back to the same double.
std::string fmt(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  std::string s = os.str();
  for (int p = 6; p < std::numeric_limits<double>::max_digits10; ++p) {
    std::ostringstream t;
    t.imbue(std::locale::classic());
    t << std::setprecision(p) << v;
    if (std::stod(t.str()) == v) return t.str();
  }
  return s;
}

std::vector<std::vector<Eigen::Vector2d>> projected_polygons(const ReachTube& tube, const std::vector<int>& dims) {
  std::vector<std::vector<Eigen::Vector2d>> out;
  for (std::size_t i = 1; i < tube.sets.size(); ++i) out.push_back(polygon(project(tube.sets[i], dims)));
  return out;
}

}  // namespace

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json matrix_json(const Matrix& M) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    a.push_back(row);
  }
  return a;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json check_document(const DocumentHeader& h, const ResilienceVerdict& v) {
  Json doc = header_json(h);
  const auto& d = v.diagnostics;

  Json eig = Json::array();
  for (const auto& e : d.eigenvalues) eig.push_back({e.real(), e.imag()});
  Json wit = Json::array();
  for (const auto& w : d.eigenvector_witnesses)
    wit.push_back({{"eigenvalue", w.eigenvalue}, {"alignment", w.alignment}, {"orthogonal", w.orthogonal}});

  doc["z"] = {{"empty", v.z_empty},
              {"dim", v.z_dim ? Json(*v.z_dim) : Json("-inf")},
              {"exact", v.z_exact}};
  doc["rank_B"] = d.rank_B;
  doc["conditions"] = {
      {"rank", {{"holds", v.rank_condition}, {"controllability_rank", d.controllability_rank}}},
      {"spectrum",
       {{"class", to_string(v.spectrum)}, {"max_real_part", d.max_real_part}, {"eigenvalues", eig}}},
      {"eigenvector", {{"holds", v.eigenvector_condition}, {"witnesses", wit}}}};
  doc["resiliently_stabilizable"] = v.resiliently_stabilizable;
  doc["resilient"] = v.resilient;
  doc["corollary"] = {{"dim_equals_rank_B", v.dim_equals_rankB},
                      {"nominal_stabilizable", d.nominal_stabilizable},
                      {"nominal_controllable", d.nominal_controllable}};
  doc["possibly_conservative"] = d.possibly_conservative;
  doc["notes"] = d.notes;
  doc["tolerances"] = tolerances_json(d.tolerances);
  return doc;
}

Json tube_document(const DocumentHeader& h, const ReachTube& tube, const std::vector<int>& dims) {
  Json doc = header_json(h);
  doc["horizon"] = tube.horizon;
  doc["steps"] = tube.steps;
  doc["x0"] = vector_json(tube.x0);
  doc["dims"] = {dims[0] + 1, dims[1] + 1};
  const double slice_at = tube.x0(dims[0]);
  doc["slice_value"] = slice_at;

  Json sets = Json::array();
  for (std::size_t i = 0; i < tube.sets.size(); ++i) {
    const Zonotope& Z = tube.sets[i];
    const Interval sx = extent(Z, dims[0]);
    const Interval sy = extent(Z, dims[1]);
    const auto sl = slice_extent(Z, dims[1], dims[0], slice_at);
    sets.push_back({{"step", static_cast<int>(i)},
                    {"time", tube.times[i]},
                    {"center", vector_json(Z.center())},
                    {"generators", matrix_json(Z.generators())},
                    {"shadow", {interval_json(sx), interval_json(sy)}},
                    {"slice", sl ? interval_json(*sl) : Json(nullptr)}});
  }
  doc["sets"] = sets;
  return doc;
}

std::string tube_csv(const ReachTube& tube, const std::vector<int>& dims) {
  std::ostringstream os;
  os << "step,time,vertex_index,x,y\n";
  const auto polys = projected_polygons(tube, dims);
  for (std::size_t i = 0; i < polys.size(); ++i)
    for (std::size_t k = 0; k < polys[i].size(); ++k)
      os << i + 1 << ',' << fmt(tube.times[i + 1]) << ',' << k << ',' << fmt(polys[i][k].x()) << ','
         << fmt(polys[i][k].y()) << '\n';
  return os.str();
}

std::string tube_svg(const ReachTube& tube, const std::vector<int>& dims, const std::vector<std::string>& axis_labels) {
  const auto polys = projected_polygons(tube, dims);
  double xlo = tube.x0(dims[0]), xhi = xlo, ylo = tube.x0(dims[1]), yhi = ylo;
  for (const auto& p : polys)
    for (const auto& v : p) {
      xlo = std::min(xlo, v.x());
      xhi = std::max(xhi, v.x());
      ylo = std::min(ylo, v.y());
      yhi = std::max(yhi, v.y());
    }
  const double pad = 0.05;
  double wx = std::max(xhi - xlo, 1e-12), wy = std::max(yhi - ylo, 1e-12);
  xlo -= pad * wx, xhi += pad * wx, ylo -= pad * wy, yhi += pad * wy;
  wx = xhi - xlo, wy = yhi - ylo;

  const double W = 480, H = 480, M = 50;
  auto X = [&](double x) { return M + (x - xlo) / wx * W; };
  auto Y = [&](double y) { return M + (yhi - y) / wy * H; };

  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W + 2 * M << "\" height=\"" << H + 2 * M
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect x=\"" << M << "\" y=\"" << M << "\" width=\"" << W << "\" height=\"" << H
     << "\" fill=\"none\" stroke=\"#888\"/>\n";
  // largest set first so the smaller ones stay visible
  for (std::size_t i = polys.size(); i-- > 0;) {
    const double shade = polys.size() > 1 ? static_cast<double>(i) / (polys.size() - 1) : 1.0;
    const int g = static_cast<int>(200 - 120 * shade);
    os << "<polygon data-step=\"" << i + 1 << "\" fill=\"rgb(" << g << ',' << g << ",255)\" fill-opacity=\"0.6\" "
       << "stroke=\"#224\" stroke-width=\"1\" points=\"";
    for (std::size_t k = 0; k < polys[i].size(); ++k)
      os << (k ? " " : "") << X(polys[i][k].x()) << ',' << Y(polys[i][k].y());
    os << "\"/>\n";
  }
  os << "<circle cx=\"" << X(tube.x0(dims[0])) << "\" cy=\"" << Y(tube.x0(dims[1])) << "\" r=\"3\" fill=\"#c00\"/>\n";
  os << std::setprecision(4);
  os << "<text x=\"" << M + W / 2 << "\" y=\"" << H + 2 * M - 12 << "\" text-anchor=\"middle\">"
     << axis_labels.at(0) << " [" << xlo << ", " << xhi << "]</text>\n";
  os << "<text x=\"14\" y=\"" << M + H / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << M + H / 2
     << ")\">" << axis_labels.at(1) << " [" << ylo << ", " << yhi << "]</text>\n";
  os << "</svg>\n";
  return os.str();
}

Json bounds_document(const DocumentHeader& h, const BoundsReport& r, const BoundsMeta& meta,
                     const std::optional<OracleTimes>& oracle) {
  Json doc = header_json(h);
  doc["x0"] = vector_json(r.x0);
  doc["seed"] = meta.seed;
  doc["samples"] = meta.samples;
  doc["pairs_evaluated"] = r.best.pairs;
  doc["hypotheses"] = {{"full_rank_B", r.hypotheses.full_rank_B},
                       {"resiliently_stabilizable", r.hypotheses.resiliently_stabilizable},
                       {"z_interior", r.hypotheses.z_interior}};
  doc["T_N"] = interval_json(r.best.T_N);
  doc["T_M"] = interval_json(r.best.T_M);
  doc["r_q"] = {{"lower", r.best.rq_lower}, {"upper", r.best.rq_upper}, {"clamped", r.best.rq_clamped}};
  doc["best"] = summary_json(r.best);
  Json src = Json::array();
  for (const auto& s : r.sources) src.push_back(summary_json(s));
  doc["sources"] = src;
  doc["flags"] = r.flags;
  doc["notes"] = r.notes;
  if (oracle) {
    doc["oracle"] = {{"dt", oracle->dt},
                     {"t_max", oracle->t_max},
                     {"T_N", oracle->T_N ? Json(*oracle->T_N) : Json(nullptr)},
                     {"T_M", oracle->T_M ? Json(*oracle->T_M) : Json(nullptr)}};
  }
  return doc;
}

}  // namespace reskit
