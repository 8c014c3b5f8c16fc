#include "odepth/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "odepth/error.hpp"

namespace odepth::io {

namespace {

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw SchemaError(std::string(what) + ": " + e.what());
  }
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

json point_json(const Point& p) { return json::array({to_json(p[0]), to_json(p[1])}); }

Point point_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw SchemaError("a point is an array of two numbers");
  return {complex_from_json(j[0]), complex_from_json(j[1])};
}

std::array<double, 2> real_pair(const json& j) {
  if (!j.is_array() || j.size() != 2) throw SchemaError("expected an array of two numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

json opt_int(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

std::optional<int> int_or_null(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<int>();
}

}  // namespace

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write " + path);
  out << j.dump(2) << '\n';
}

void check_schema(const json& j, const char* expected) {
  if (!j.is_object()) throw SchemaError("document must be a JSON object");
  if (j.contains("placeholder")) throw SchemaError("placeholder fixture: " + j.at("placeholder").get<std::string>());
  if (j.contains("schema") && j.at("schema") != expected)
    throw SchemaError("schema is " + j.at("schema").dump() + ", expected \"" + expected + "\"");
}

// ---------------------------------------------------------------- words and instances

json to_json(const Word& w) { return json(std::vector<int>(w.letters().begin(), w.letters().end())); }

Word word_from_json(const json& j, int rank) {
  return guarded("word", [&] {
    if (!j.is_array()) throw SchemaError("a word is an array of signed integers");
    const auto raw = j.get<std::vector<int>>();
    for (int l : raw)
      if (l == 0 || std::abs(l) > rank) throw SchemaError("letter " + std::to_string(l) + " outside rank " + std::to_string(rank));
    return Word::reduce(raw, rank);
  });
}

json to_json(const ProblemInstance& p) {
  json j{{"schema", kInstanceSchema}, {"rank", p.rank}, {"gamma", to_json(p.gamma)}, {"kmax", p.kmax}, {"mode", to_string(p.mode)}};
  if (p.uses_generators()) {
    json gens = json::array();
    for (const auto& w : p.orbit_generators) gens.push_back(to_json(w));
    j["orbit_generators"] = gens;
  } else {
    json maps = json::array();
    for (const auto& m : p.monodromy) {
      json images = json::array();
      for (const auto& w : m.images()) images.push_back(to_json(w));
      maps.push_back({{"rank", m.rank()}, {"images", images}});
    }
    j["monodromy"] = maps;
  }
  return j;
}

ProblemInstance instance_from_json(const json& j) {
  check_schema(j, kInstanceSchema);
  return guarded("instance", [&] {
    ProblemInstance p;
    p.rank = field(j, "rank").get<int>();
    if (p.rank < 1 || p.rank > 16) throw SchemaError("rank must be between 1 and 16");
    p.gamma = j.contains("gamma") ? word_from_json(j.at("gamma"), p.rank) : Word(p.rank);
    if (j.contains("kmax")) p.kmax = j.at("kmax").get<int>();
    if (j.contains("mode")) {
      try {
        p.mode = parse_mode(j.at("mode").get<std::string>());
      } catch (const DomainError& e) {
        throw SchemaError(e.what());
      }
    }
    if (j.contains("monodromy")) {
      for (const auto& m : j.at("monodromy")) {
        if (m.contains("rank") && m.at("rank").get<int>() != p.rank) throw SchemaError("monodromy rank differs from instance rank");
        std::vector<Word> images;
        for (const auto& w : field(m, "images")) images.push_back(word_from_json(w, p.rank));
        if (static_cast<int>(images.size()) != p.rank) throw SchemaError("a monodromy map needs one image per generator");
        p.monodromy.emplace_back(p.rank, std::move(images));
      }
    }
    if (j.contains("orbit_generators"))
      for (const auto& w : j.at("orbit_generators")) p.orbit_generators.push_back(word_from_json(w, p.rank));
    return p;
  });
}

// ---------------------------------------------------------------- depth reports

json to_json(const DepthReport& r) {
  json grades = json::array();
  for (const auto& g : r.grades) {
    json torsion = json::array();
    for (const auto& t : g.torsion) torsion.push_back(t.get_str());
    grades.push_back({{"j", g.j},
                      {"dim_n1", g.dim_n1},
                      {"dim_n0", g.dim_n0},
                      {"dim_image", g.dim_image},
                      {"contained_next", g.contained_next},
                      {"rank_orbit", g.rank_orbit},
                      {"rank_k", g.rank_k},
                      {"torsion", torsion},
                      {"lattice_contained_next", g.lattice_contained_next}});
  }
  return {{"schema", kDepthReportSchema},
          {"rank", r.rank},
          {"kmax", r.kmax},
          {"mode", to_string(r.mode)},
          {"has_rational", r.has_rational},
          {"has_integral", r.has_integral},
          {"status", r.k ? "determined" : "undetermined(>kmax)"},
          {"k", opt_int(r.k)},
          {"kappa_graded", opt_int(r.kappa_graded)},
          {"stabilized", r.stabilized},
          {"ch1_dim", r.ch1_dim},
          {"grades", grades},
          {"warnings", r.warnings}};
}

DepthReport report_from_json(const json& j) {
  check_schema(j, kDepthReportSchema);
  return guarded("depth report", [&] {
    DepthReport r;
    r.rank = field(j, "rank").get<int>();
    r.kmax = field(j, "kmax").get<int>();
    r.mode = parse_mode(field(j, "mode").get<std::string>());
    r.has_rational = field(j, "has_rational").get<bool>();
    r.has_integral = field(j, "has_integral").get<bool>();
    r.k = int_or_null(field(j, "k"));
    r.kappa_graded = int_or_null(field(j, "kappa_graded"));
    r.stabilized = field(j, "stabilized").get<bool>();
    r.ch1_dim = field(j, "ch1_dim").get<int>();
    for (const auto& g : field(j, "grades")) {
      GradeInfo info;
      info.j = field(g, "j").get<int>();
      info.dim_n1 = field(g, "dim_n1").get<int>();
      info.dim_n0 = field(g, "dim_n0").get<int>();
      info.dim_image = field(g, "dim_image").get<int>();
      info.contained_next = field(g, "contained_next").get<bool>();
      info.rank_orbit = field(g, "rank_orbit").get<int>();
      info.rank_k = field(g, "rank_k").get<int>();
      for (const auto& t : field(g, "torsion")) info.torsion.emplace_back(t.get<std::string>());
      info.lattice_contained_next = field(g, "lattice_contained_next").get<bool>();
      r.grades.push_back(std::move(info));
    }
    r.warnings = field(j, "warnings").get<std::vector<std::string>>();
    return r;
  });
}

std::string depth_table(const DepthReport& r) {
  std::ostringstream out;
  out << "rank " << r.rank << ", kmax " << r.kmax << ", mode " << to_string(r.mode) << '\n';
  out << "k = " << (r.k ? std::to_string(*r.k) : "undetermined(>kmax)");
  if (r.has_integral) out << ", kappa_graded = " << (r.kappa_graded ? std::to_string(*r.kappa_graded) : "undetermined");
  out << ", dim CH1 = " << r.ch1_dim << (r.stabilized ? "" : " (not stabilized)") << '\n';
  out << std::setw(3) << "j" << std::setw(8) << "dimN1" << std::setw(8) << "dimN0" << std::setw(8) << "image" << std::setw(7) << "next";
  if (r.has_integral) out << std::setw(8) << "rankO" << std::setw(8) << "rankK" << std::setw(7) << "lat" << "  torsion";
  out << '\n';
  for (const auto& g : r.grades) {
    out << std::setw(3) << g.j << std::setw(8) << g.dim_n1 << std::setw(8) << g.dim_n0 << std::setw(8) << g.dim_image
        << std::setw(7) << (g.contained_next ? "yes" : "no");
    if (r.has_integral) {
      out << std::setw(8) << g.rank_orbit << std::setw(8) << g.rank_k << std::setw(7) << (g.lattice_contained_next ? "yes" : "no") << "  [";
      for (std::size_t i = 0; i < g.torsion.size(); ++i) out << (i ? "," : "") << g.torsion[i].get_str();
      out << ']';
    }
    out << '\n';
  }
  for (const auto& w : r.warnings) out << "warning: " << w << '\n';
  return out.str();
}

// ---------------------------------------------------------------- polynomials, forms, paths

json to_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

cplx complex_from_json(const json& j) {
  return guarded("complex number", [&] {
    if (j.is_number()) return cplx(j.get<double>());
    return cplx(field(j, "re").get<double>(), j.contains("im") ? j.at("im").get<double>() : 0.0);
  });
}

json to_json(const Poly2& p) {
  json out = json::array();
  for (const auto& t : p.terms()) out.push_back({{"dx", t.i}, {"dy", t.j}, {"re", t.c.real()}, {"im", t.c.imag()}});
  return out;
}

Poly2 poly_from_json(const json& j) {
  return guarded("polynomial", [&] {
    if (!j.is_array()) throw SchemaError("a polynomial is an array of monomials");
    std::vector<Poly2::Term> terms;
    for (const auto& m : j) {
      const int i = m.contains("dx") ? m.at("dx").get<int>() : 0;
      const int k = m.contains("dy") ? m.at("dy").get<int>() : 0;
      if (i < 0 || k < 0) throw SchemaError("negative exponent");
      terms.push_back({i, k, cplx(field(m, "re").get<double>(), m.contains("im") ? m.at("im").get<double>() : 0.0)});
    }
    return Poly2(std::move(terms));
  });
}

json to_json(const OneForm& w) { return {{"p", to_json(w.p)}, {"q", to_json(w.q)}, {"d", to_json(w.d)}}; }

OneForm form_from_json(const json& j) {
  return guarded("one-form", [&] {
    const Poly2 p = j.contains("p") ? poly_from_json(j.at("p")) : Poly2();
    const Poly2 q = j.contains("q") ? poly_from_json(j.at("q")) : Poly2();
    const Poly2 d = j.contains("d") ? poly_from_json(j.at("d")) : Poly2::constant(1.0);
    if (d.is_zero()) throw SchemaError("one-form denominator is identically zero");
    return OneForm(p, q, d);
  });
}

json to_json(const Segment& s) {
  return std::visit(
      [](const auto& g) -> json {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PolySegment>) {
          json x = json::array(), y = json::array();
          for (auto c : g.coeffs[0]) x.push_back(to_json(c));
          for (auto c : g.coeffs[1]) y.push_back(to_json(c));
          return {{"kind", "poly"}, {"x", x}, {"y", y}};
        } else if constexpr (std::is_same_v<T, ArcSegment>) {
          return {{"kind", "arc"}, {"center", point_json(g.center)}, {"u", point_json(g.u)}, {"v", point_json(g.v)},
                  {"theta0", g.theta0}, {"sweep", g.sweep}};
        } else {
          return {{"kind", "level"}, {"hamiltonian", to_json(g.hamiltonian)}, {"start", g.start}, {"duration", g.duration}};
        }
      },
      s);
}

Segment segment_from_json(const json& j) {
  return guarded("segment", [&]() -> Segment {
    const std::string kind = field(j, "kind").get<std::string>();
    if (kind == "poly") {
      PolySegment s;
      for (const auto& c : field(j, "x")) s.coeffs[0].push_back(complex_from_json(c));
      for (const auto& c : field(j, "y")) s.coeffs[1].push_back(complex_from_json(c));
      if (s.coeffs[0].empty() || s.coeffs[1].empty()) throw SchemaError("polynomial segment needs coefficients");
      return s;
    }
    if (kind == "arc") {
      return ArcSegment{point_from_json(field(j, "center")), point_from_json(field(j, "u")), point_from_json(field(j, "v")),
                        field(j, "theta0").get<double>(), field(j, "sweep").get<double>()};
    }
    if (kind == "level") {
      const Poly2 h = poly_from_json(field(j, "hamiltonian"));
      if (!h.is_real()) throw SchemaError("level segments need a real Hamiltonian");
      return LevelSegment{h, real_pair(field(j, "start")), field(j, "duration").get<double>()};
    }
    throw SchemaError("unknown segment kind \"" + kind + "\"");
  });
}

json to_json(const Path& p) {
  json segs = json::array();
  for (const auto& s : p.segments()) segs.push_back(to_json(s));
  return {{"closed", p.closed()}, {"segments", segs}};
}

Path path_from_json(const json& j, double join_tol) {
  return guarded("path", [&] {
    std::vector<Segment> segs;
    for (const auto& s : field(j, "segments")) segs.push_back(segment_from_json(s));
    return Path(std::move(segs), j.contains("closed") && j.at("closed").get<bool>(), join_tol);
  });
}

// ---------------------------------------------------------------- planar systems

json to_json(const TransversalSpec& t) { return {{"base", t.base}, {"direction", t.direction}}; }

TransversalSpec transversal_from_json(const json& j) {
  return guarded("transversal", [&] { return TransversalSpec{real_pair(field(j, "base")), real_pair(field(j, "direction"))}; });
}

json system_to_json(const PlanarSystem& s, const TransversalSpec& tau) {
  json forms = json::array();
  for (const auto& [order, w] : s.forms) {
    json f = to_json(w);
    f["order"] = order;
    forms.push_back(f);
  }
  return {{"schema", kSystemSchema}, {"hamiltonian", to_json(s.hamiltonian)}, {"forms", forms}, {"transversal", to_json(tau)}};
}

std::pair<PlanarSystem, TransversalSpec> system_from_json(const json& j) {
  check_schema(j, kSystemSchema);
  return guarded("system", [&] {
    PlanarSystem s;
    s.hamiltonian = poly_from_json(field(j, "hamiltonian"));
    if (j.contains("construction")) {
      const json& c = j.at("construction");
      s = m2_construction(form_from_json(field(c, "theta1")), form_from_json(field(c, "theta2")), s.hamiltonian,
                          field(c, "t0").get<double>(), field(c, "lambda").get<double>())
              .system;
    } else {
      for (const auto& f : field(j, "forms")) {
        const int order = field(f, "order").get<int>();
        if (!s.forms.emplace(order, form_from_json(f)).second) throw SchemaError("duplicate form order " + std::to_string(order));
      }
    }
    try {
      s.validate();
    } catch (const DomainError& e) {
      throw SchemaError(e.what());
    }
    return std::pair{s, transversal_from_json(field(j, "transversal"))};
  });
}

json to_json(const DisplacementSample& s) {
  return {{"t", s.t}, {"eps", s.eps}, {"delta", s.delta}, {"return_time", s.return_time}, {"error", s.error}};
}

json to_json(const MelnikovFit& f) {
  return {{"t", f.t},
          {"coefficients", f.coefficients},
          {"std_errors", f.std_errors},
          {"mu", opt_int(f.mu)},
          {"below_noise_floor", f.below_noise_floor},
          {"plateau", f.plateau},
          {"residual", f.residual},
          {"noise", f.noise}};
}

}  // namespace odepth::io
