#include "cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <new>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "odepth/error.hpp"
#include "odepth/fixtures.hpp"

namespace odepth::cli {

using io::json;

namespace {

std::vector<double> split_numbers(const std::string& spec, std::size_t count, const char* what) {
  std::vector<double> v;
  std::stringstream in(spec);
  std::string part;
  while (std::getline(in, part, ':')) {
    std::size_t used = 0;
    try {
      v.push_back(std::stod(part, &used));
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != part.size()) throw SchemaError(std::string(what) + ": cannot parse \"" + part + "\"");
  }
  if (v.size() != count) throw SchemaError(std::string(what) + ": expected " + std::to_string(count) + " fields in \"" + spec + "\"");
  return v;
}

int grid_count(double m, const char* what) {
  if (m < 1 || m > 10000 || m != std::floor(m)) throw SchemaError(std::string(what) + ": count must be an integer in [1, 10000]");
  return static_cast<int>(m);
}

std::string word_string(std::span<const int> letters) {
  std::string s = "[";
  for (std::size_t i = 0; i < letters.size(); ++i) s += (i ? "," : "") + std::to_string(letters[i]);
  return s + "]";
}

std::string fmt(double v, int precision = 10) {
  std::ostringstream o;
  o << std::setprecision(precision) << v;
  return o.str();
}

std::string fmt(cplx z) {
  std::ostringstream o;
  o << std::setprecision(10) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return o.str();
}

void emit(const RunConfig& c, std::ostream& out, const json& report, const std::string& table) {
  if (c.output.empty()) {
    out << report.dump(2) << '\n';
  } else {
    io::write_file(c.output, report);
    out << table;
  }
}

const json& fixture_document(const std::string& file) {
  static const auto docs = fixture_documents();
  for (const auto& [name, doc] : docs)
    if (name == file) return doc;
  throw SchemaError("no bundled fixture file " + file);
}

json load(const std::string& path, const std::string& fixture, const char* suffix, const char* flag) {
  if (!path.empty() && !fixture.empty()) throw SchemaError(std::string("give either ") + flag + " or --fixture");
  if (!fixture.empty()) return fixture_document(fixture + suffix);
  if (path.empty()) throw SchemaError(std::string(flag) + " or --fixture is required");
  return io::read_file(path);
}

OneForm form_field(const json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string("missing field \"") + key + "\"");
  return io::form_from_json(j.at(key));
}

std::optional<M2Construction> construction_from_json(const json& doc) {
  if (!doc.contains("construction")) return std::nullopt;
  const json& c = doc.at("construction");
  try {
    return m2_construction(form_field(c, "theta1"), form_field(c, "theta2"), io::poly_from_json(doc.at("hamiltonian")),
                           c.at("t0").get<double>(), c.at("lambda").get<double>());
  } catch (const json::exception& e) {
    throw SchemaError(std::string("construction: ") + e.what());
  }
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers; exceptions are
/// captured per index.
template <class Fn>
std::vector<std::exception_ptr> parallel_for(std::size_t n, int threads, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    worker();
    return errors;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return errors;
}

std::string message(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& x) {
    return x.what();
  } catch (...) {
    return "unknown error";
  }
}

// ---------------------------------------------------------------- fixture documents

json instance_doc(const ProblemInstance& p) { return io::to_json(p); }

json placeholder_doc(const fixtures::CatalogEntry& e) {
  return {{"schema", io::kInstanceSchema},
          {"name", e.name},
          {"expected", e.expected},
          {"description", e.description},
          {"placeholder", e.name + ": " + e.status}};
}

json paths_doc(const std::map<int, Path>& loops, const std::vector<std::vector<int>>& words) {
  json l = json::array();
  for (const auto& [letter, path] : loops) l.push_back({{"letter", letter}, {"path", io::to_json(path)}});
  return {{"schema", io::kPathsSchema}, {"loops", l}, {"words", words}};
}

json forms_doc(const std::vector<OneForm>& forms) {
  json f = json::array();
  for (const auto& w : forms) f.push_back(io::to_json(w));
  return {{"schema", io::kFormsSchema}, {"forms", f}};
}

json system_doc(const fixtures::MelnikovFixture& fx) {
  json j = io::system_to_json(fx.system, fx.transversal);
  j["t_values"] = fx.t_values;
  return j;
}

}  // namespace

// ---------------------------------------------------------------- configuration

void RunConfig::validate() const {
  if (kmax < 2) throw SchemaError("kmax must be at least 2");
  if (kmax > 12) throw SchemaError("kmax above 12 is not supported");
  for (double t : {tol, ode_tol, join_tol, pole_margin, check_tol})
    if (!(t > 0.0) || !std::isfinite(t)) throw SchemaError("tolerances must be positive");
  if (order < 1 || order > 8) throw SchemaError("order must be between 1 and 8");
  if (threads < 1) throw SchemaError("threads must be positive");
  if (samples < 0 || random_words < 0) throw SchemaError("sample counts must be non-negative");
  if (random_length < 1 || random_length > 16) throw SchemaError("random-length must be between 1 and 16");
}

std::vector<double> parse_linear_grid(const std::string& spec) {
  const auto v = split_numbers(spec, 3, "t-grid");
  const int m = grid_count(v[2], "t-grid");
  std::vector<double> grid;
  for (int i = 0; i < m; ++i) grid.push_back(m == 1 ? v[0] : v[0] + (v[1] - v[0]) * i / (m - 1));
  return grid;
}

std::vector<double> parse_geometric_grid(const std::string& spec) {
  const auto v = split_numbers(spec, 3, "eps-grid");
  const int k = grid_count(v[2], "eps-grid");
  if (!std::isfinite(v[0]) || !(v[1] > 0.0)) throw SchemaError("eps-grid: ratio must be positive");
  if (v[0] == 0.0) return std::vector<double>(static_cast<std::size_t>(k), 0.0);
  return geometric_grid(v[0], v[1], k);
}

// ---------------------------------------------------------------- fixtures

std::vector<std::pair<std::string, json>> fixture_documents() {
  std::vector<std::pair<std::string, json>> docs;
  docs.emplace_back("generic.instance.json", instance_doc(fixtures::generic_instance()));
  docs.emplace_back("codim1.instance.json", instance_doc(fixtures::codim1_instance()));
  docs.emplace_back("commutator-orbit.instance.json", instance_doc(fixtures::commutator_orbit_instance()));
  for (const auto& e : fixtures::catalog())
    if (e.status != "bundled") docs.emplace_back(e.name + ".instance.json", placeholder_doc(e));

  const auto residue = fixtures::residue_plane();
  docs.emplace_back("residue-plane.paths.json", paths_doc(residue.loops, {{-1, -2, 1, 2}, {1}, {2}, {1, 2}}));
  docs.emplace_back("residue-plane.forms.json", forms_doc(residue.forms));

  docs.emplace_back("harmonic.system.json", system_doc(fixtures::harmonic()));
  docs.emplace_back("cubic-center.system.json", system_doc(fixtures::cubic_center()));
  docs.emplace_back("counter-rotating.system.json", system_doc(fixtures::counter_rotating()));

  const auto m2 = fixtures::m2_fixture();
  docs.emplace_back("m2-fixture.system.json",
                    json{{"schema", io::kSystemSchema},
                         {"hamiltonian", io::to_json(m2.construction.f)},
                         {"construction",
                          {{"theta1", io::to_json(m2.construction.theta1)},
                           {"theta2", io::to_json(m2.construction.theta2)},
                           {"t0", m2.construction.t0},
                           {"lambda", m2.construction.lambda}}},
                         {"transversal", io::to_json(m2.transversal)},
                         {"t_values", m2.t_values}});
  return docs;
}

std::string examples_listing() {
  std::ostringstream out;
  for (const auto& e : fixtures::catalog()) {
    out << e.name << " [" << fixtures::to_string(e.kind) << "]\n"
        << "  description: " << e.description << '\n'
        << "  expected:    " << e.expected << '\n'
        << "  basis:       " << e.basis << '\n'
        << "  status:      " << e.status << '\n';
  }
  return out.str();
}

json examples_json() {
  json list = json::array();
  for (const auto& e : fixtures::catalog())
    list.push_back({{"name", e.name},
                    {"kind", fixtures::to_string(e.kind)},
                    {"description", e.description},
                    {"expected", e.expected},
                    {"basis", e.basis},
                    {"status", e.status}});
  return {{"schema", io::kExamplesSchema}, {"fixtures", list}};
}

// ---------------------------------------------------------------- depth

int run_depth(const RunConfig& c, std::ostream& out) {
  ProblemInstance inst = io::instance_from_json(load(c.input, c.fixture, ".instance.json", "--input"));
  if (c.kmax_set) inst.kmax = c.kmax;
  if (!c.mode.empty()) inst.mode = parse_mode(c.mode);
  if (inst.kmax < 2) throw SchemaError("kmax must be at least 2");
  try {
    inst.validate();
  } catch (const DomainError& e) {
    throw SchemaError(e.what());
  } catch (const RankMismatch& e) {
    throw SchemaError(e.what());
  }
  const DepthReport report = analyze(inst);
  emit(c, out, io::to_json(report), io::depth_table(report));
  return report.k ? kOk : kUndetermined;
}

// ---------------------------------------------------------------- chen

int run_chen(const RunConfig& c, std::ostream& out) {
  const json pdoc = load(c.input, c.fixture, ".paths.json", "--paths");
  const json fdoc = c.fixture.empty() ? load(c.forms, "", "", "--forms") : fixture_document(c.fixture + ".forms.json");
  io::check_schema(pdoc, io::kPathsSchema);
  io::check_schema(fdoc, io::kFormsSchema);
  if (c.order > 6) throw SchemaError("chen order must be at most 6");

  std::vector<OneForm> forms;
  std::map<int, Path> loops;
  std::vector<Word> words;
  try {
    for (const auto& f : fdoc.at("forms")) forms.push_back(io::form_from_json(f));
    for (const auto& l : pdoc.at("loops")) {
      const int letter = l.at("letter").get<int>();
      if (letter < 1 || !loops.emplace(letter, io::path_from_json(l.at("path"), c.join_tol)).second)
        throw SchemaError("loop letters must be distinct positive integers");
    }
    if (loops.empty() || loops.rbegin()->first != static_cast<int>(loops.size()))
      throw SchemaError("loop letters must be 1..n");
    for (const auto& w : pdoc.at("words")) words.push_back(io::word_from_json(w, static_cast<int>(loops.size())));
  } catch (const json::exception& e) {
    throw SchemaError(std::string("chen input: ") + e.what());
  }
  const int n = static_cast<int>(forms.size());
  if (n < 1 || n > 8) throw SchemaError("between 1 and 8 forms are supported");

  std::mt19937_64 rng(c.seed);
  const int nloops = static_cast<int>(loops.size());
  for (int r = 0; r < c.random_words; ++r) {
    std::vector<int> letters;
    std::uniform_int_distribution<int> pick(1, 2 * nloops);
    while (static_cast<int>(letters.size()) < c.random_length) {
      int l = pick(rng);
      l = l > nloops ? nloops - l : l;
      if (letters.empty() || letters.back() != -l) letters.push_back(l);
    }
    words.push_back(Word::reduce(letters, nloops));
  }

  const ChenOptions opts{c.tol, c.pole_margin};
  auto transport = [&](const Word& w) { return chen_transport(word_path(loops, w, c.join_tol), forms, c.order, opts); };

  // Coefficient words up to the largest length keeping the table at most 4096 rows.
  std::vector<std::vector<int>> table_words;
  {
    std::vector<std::vector<int>> layer{{}};
    for (int len = 1; len <= c.order; ++len) {
      std::vector<std::vector<int>> next;
      for (const auto& w : layer)
        for (int a = 1; a <= n; ++a) {
          auto v = w;
          v.push_back(a);
          next.push_back(std::move(v));
        }
      if (table_words.size() + next.size() > 4096) break;
      table_words.insert(table_words.end(), next.begin(), next.end());
      layer = std::move(next);
    }
  }

  double shuffle_max = 0.0, mult_max = 0.0;
  long shuffle_pairs = 0, splits = 0;
  json entries = json::array();
  std::ostringstream table;
  for (const auto& w : words) {
    const ChenState s = transport(w);
    json coeffs = json::array();
    for (const auto& tw : table_words) {
      const cplx z = s.coefficient(tw);
      coeffs.push_back({{"word", tw}, {"re", z.real()}, {"im", z.imag()}});
    }
    double w_shuffle = 0.0;
    if (c.order >= 2) {
      std::uniform_int_distribution<int> letter(1, n);
      for (int k = 0; k < c.samples; ++k) {
        const int lu = std::uniform_int_distribution<int>(1, c.order - 1)(rng);
        const int lv = std::uniform_int_distribution<int>(1, c.order - lu)(rng);
        std::vector<int> u(static_cast<std::size_t>(lu)), v(static_cast<std::size_t>(lv));
        for (auto& a : u) a = letter(rng);
        for (auto& a : v) a = letter(rng);
        w_shuffle = std::max(w_shuffle, s.shuffle_residual(u, v));
        ++shuffle_pairs;
      }
    }
    double w_mult = 0.0;
    const auto& letters = w.letters();
    for (std::size_t cut = 1; cut < letters.size(); ++cut) {
      const std::vector<int> a(letters.begin(), letters.begin() + static_cast<long>(cut));
      const std::vector<int> b(letters.begin() + static_cast<long>(cut), letters.end());
      const ChenState prod = transport(Word::reduce(a, nloops)) * transport(Word::reduce(b, nloops));
      w_mult = std::max(w_mult, prod.max_abs_diff(s));
      ++splits;
    }
    shuffle_max = std::max(shuffle_max, w_shuffle);
    mult_max = std::max(mult_max, w_mult);
    const std::vector<int> lw(letters.begin(), letters.end());
    entries.push_back({{"word", lw}, {"coefficients", coeffs}, {"shuffle_residual", w_shuffle}, {"multiplicativity_residual", w_mult}});

    table << "word " << word_string(lw) << '\n';
    for (const auto& tw : table_words) {
      if (tw.size() > 2) break;
      table << "  " << std::setw(8) << std::left << word_string(tw) << std::right << "  " << fmt(s.coefficient(tw)) << '\n';
    }
  }
  const bool shuffle_ok = shuffle_max < c.check_tol;
  const bool mult_ok = mult_max < c.check_tol;
  table << "shuffle check: max residual " << fmt(shuffle_max, 3) << " over " << shuffle_pairs << " pairs: "
        << (shuffle_ok ? "PASS" : "FAIL") << '\n'
        << "multiplicativity check: max residual " << fmt(mult_max, 3) << " over " << splits << " splits: "
        << (mult_ok ? "PASS" : "FAIL") << '\n';

  const json report{{"schema", io::kChenReportSchema},
                    {"order", c.order},
                    {"tol", c.tol},
                    {"pole_margin", c.pole_margin},
                    {"seed", c.seed},
                    {"forms", n},
                    {"words", entries},
                    {"checks",
                     {{"tolerance", c.check_tol},
                      {"shuffle", {{"max_residual", shuffle_max}, {"pairs", shuffle_pairs}, {"pass", shuffle_ok}}},
                      {"multiplicativity", {{"max_residual", mult_max}, {"splits", splits}, {"pass", mult_ok}}}}},
                    {"pass", shuffle_ok && mult_ok}};
  emit(c, out, report, table.str());
  return shuffle_ok && mult_ok ? kOk : kModuleError;
}

// ---------------------------------------------------------------- melnikov

namespace {

struct TResult {
  std::vector<DisplacementSample> samples;
  std::optional<MelnikovFit> fit;
  std::string fit_error;
  std::optional<cplx> period;
  std::optional<double> m2_prediction;
  std::optional<double> m2_hypothesis;
};

}  // namespace

int run_melnikov(const RunConfig& c, std::ostream& out) {
  const json doc = load(c.input, c.fixture, ".system.json", "--system");
  const auto [system, tau] = io::system_from_json(doc);
  const auto construction = construction_from_json(doc);

  std::vector<double> ts;
  if (!c.t_grid.empty()) {
    ts = parse_linear_grid(c.t_grid);
  } else if (doc.contains("t_values")) {
    try {
      ts = doc.at("t_values").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw SchemaError(std::string("t_values: ") + e.what());
    }
  } else {
    throw SchemaError("--t-grid is required for systems without t_values");
  }
  const std::vector<double> eps = parse_geometric_grid(c.eps_grid);
  const bool smoke = std::all_of(eps.begin(), eps.end(), [](double e) { return e == 0.0; });

  ReturnOptions ropt;
  ropt.tol = c.ode_tol;
  FitOptions fopt;
  fopt.order = c.order;
  const ChenOptions copt{c.tol, c.pole_margin};

  std::vector<TResult> results(ts.size());
  const auto errors = parallel_for(ts.size(), c.threads, [&](std::size_t i) {
    TResult& r = results[i];
    r.samples = sample_displacement(system, tau, ts[i], eps, ropt);
    if (!smoke) {
      try {
        r.fit = fit_melnikov(r.samples, fopt);
      } catch (const FitError& e) {
        r.fit_error = e.what();
      }
    }
    if (system.forms.count(1)) {
      const Path loop = fiber_loop(system.hamiltonian, tau, ts[i], ropt);
      r.period = iterated_integral(loop, std::vector<OneForm>{system.forms.at(1)}, copt);
      if (construction) {
        r.m2_hypothesis = check_m2_hypothesis(*construction, {loop}, HUGE_VAL);
        r.m2_prediction = predicted_m2(*construction, loop, c.tol).real();
      }
    }
  });

  bool failed = false;
  json rows = json::array();
  std::ostringstream table;
  table << std::setw(10) << "t" << std::setw(18) << "M1" << std::setw(18) << "-int eta1" << std::setw(5) << "mu"
        << std::setw(18) << "M2" << std::setw(18) << "int w w'" << '\n';
  double smoke_max = 0.0, smoke_floor = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const TResult& r = results[i];
    json row{{"t", ts[i]}};
    if (errors[i]) {
      failed = true;
      row["error"] = message(errors[i]);
      rows.push_back(row);
      table << std::setw(10) << ts[i] << "  error: " << message(errors[i]) << '\n';
      continue;
    }
    json samples = json::array();
    for (const auto& s : r.samples) {
      samples.push_back(io::to_json(s));
      smoke_max = std::max(smoke_max, std::abs(s.delta));
      smoke_floor = std::max(smoke_floor, s.error);
    }
    row["samples"] = samples;
    row["fit"] = r.fit ? io::to_json(*r.fit) : json(nullptr);
    if (!r.fit_error.empty()) {
      failed = true;
      row["fit_error"] = r.fit_error;
    }
    if (r.period) {
      row["period_integral"] = io::to_json(*r.period);
      row["reference_m1"] = -r.period->real();
    }
    if (r.m2_prediction) {
      row["predicted_m2"] = *r.m2_prediction;
      row["m2_hypothesis_residual"] = *r.m2_hypothesis;
    }
    rows.push_back(row);

    auto cell = [&](std::optional<double> v) { return v ? fmt(*v) : std::string("-"); };
    const std::optional<double> m1 = r.fit ? std::optional(r.fit->coefficient(1)) : std::nullopt;
    const std::optional<double> m2 = r.fit && r.fit->coefficients.size() >= 2 ? std::optional(r.fit->coefficient(2)) : std::nullopt;
    table << std::setw(10) << ts[i] << std::setw(18) << cell(m1) << std::setw(18)
          << cell(r.period ? std::optional(-r.period->real()) : std::nullopt) << std::setw(5)
          << (r.fit && r.fit->mu ? std::to_string(*r.fit->mu) : "-") << std::setw(18) << cell(m2) << std::setw(18)
          << cell(r.m2_prediction) << (r.fit_error.empty() ? "" : "  fit error: " + r.fit_error) << '\n';
  }

  json report{{"schema", io::kMelnikovReportSchema},
              {"t_grid", ts},
              {"eps_grid", eps},
              {"order", c.order},
              {"ode_tol", c.ode_tol},
              {"tol", c.tol},
              {"results", rows}};
  if (smoke) {
    // Unperturbed run: the displacement must vanish up to integration error.
    const double floor = std::max(10.0 * smoke_floor, 1e-10);
    const bool below = smoke_max <= floor;
    report["smoke"] = {{"max_abs_delta", smoke_max}, {"noise_floor", floor}, {"below_noise_floor", below}};
    table << "eps = 0: max |delta| " << fmt(smoke_max, 3) << (below ? " below" : " above") << " noise floor "
          << fmt(floor, 3) << '\n';
    failed = failed || !below;
  }
  if (!c.csv.empty()) {
    std::ofstream csv(c.csv);
    if (!csv) throw SchemaError("cannot write " + c.csv);
    csv << "t,eps,delta,return_time,error\n";
    char line[160];
    for (const auto& r : results)
      for (const auto& s : r.samples) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.eps, s.delta, s.return_time, s.error);
        csv << line;
      }
  }
  emit(c, out, report, table.str());
  return failed ? kModuleError : kOk;
}

// ---------------------------------------------------------------- entry point

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Orbit depth, iterated integrals and Melnikov functions", "odepth"};
  app.require_subcommand(1);
  RunConfig c;

  auto* depth = app.add_subcommand("depth", "Torsion-free orbit depth of an instance");
  depth->add_option("--input", c.input, "Instance file");
  depth->add_option("--fixture", c.fixture, "Bundled instance name");
  auto* kmax = depth->add_option("--kmax", c.kmax, "Highest grade examined");
  depth->add_option("--mode", c.mode, "rational, integral or both")->check(CLI::IsMember({"rational", "integral", "both"}));
  depth->add_option("--out", c.output, "Write the JSON report here");

  auto* chen = app.add_subcommand("chen", "Iterated integrals along loop words");
  chen->add_option("--paths", c.input, "Loops and words file");
  chen->add_option("--forms", c.forms, "One-forms file");
  chen->add_option("--fixture", c.fixture, "Bundled paths and forms name");
  chen->add_option("--order", c.order, "Truncation degree");
  chen->add_option("--tol", c.tol, "Transport tolerance");
  chen->add_option("--pole-margin", c.pole_margin, "Smallest allowed denominator modulus");
  chen->add_option("--join-tol", c.join_tol, "Endpoint matching tolerance");
  chen->add_option("--check-tol", c.check_tol, "Threshold of the shuffle and multiplicativity checks");
  chen->add_option("--samples", c.samples, "Random shuffle pairs per word");
  chen->add_option("--random-words", c.random_words, "Extra random loop words");
  chen->add_option("--random-length", c.random_length, "Length of the random words");
  chen->add_option("--seed", c.seed, "Seed of the random checks");
  chen->add_option("--out", c.output, "Write the JSON report here");

  auto* mel = app.add_subcommand("melnikov", "Displacement sampling and Melnikov coefficient fits");
  mel->add_option("--system", c.input, "System file");
  mel->add_option("--fixture", c.fixture, "Bundled system name");
  mel->add_option("--t-grid", c.t_grid, "a:b:m, m levels from a to b");
  mel->add_option("--eps-grid", c.eps_grid, "e0:r:k, k values e0 r^i")->capture_default_str();
  mel->add_option("--order", c.order, "Number of fitted coefficients");
  mel->add_option("--tol", c.tol, "Quadrature tolerance");
  mel->add_option("--ode-tol", c.ode_tol, "Return-map integration tolerance");
  mel->add_option("--threads", c.threads, "Worker threads over the t grid");
  mel->add_option("--csv", c.csv, "Write the samples as CSV");
  mel->add_option("--out", c.output, "Write the JSON report here");

  auto* ex = app.add_subcommand("examples", "Bundled fixtures");
  bool list = false;
  std::string write_dir;
  ex->add_flag("--list", list, "Print the catalog");
  ex->add_option("--write", write_dir, "Write the fixture input files to this directory");
  ex->add_option("--out", c.output, "Write the catalog as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }
  c.kmax_set = kmax->count() > 0;

  try {
    c.validate();
    if (depth->parsed()) return run_depth(c, out);
    if (chen->parsed()) return run_chen(c, out);
    if (mel->parsed()) return run_melnikov(c, out);
    if (!write_dir.empty()) {
      std::filesystem::create_directories(write_dir);
      for (const auto& [name, doc] : fixture_documents()) {
        const auto path = (std::filesystem::path(write_dir) / name).string();
        io::write_file(path, doc);
        out << "wrote " << path << '\n';
      }
    }
    if (!c.output.empty()) io::write_file(c.output, examples_json());
    if (list || (write_dir.empty() && c.output.empty())) out << examples_listing();
    return kOk;
  } catch (const SchemaError& e) {
    err << "odepth: " << e.what() << '\n';
    return kUsage;
  } catch (const ResourceLimit& e) {
    err << "odepth: resource cap: " << e.what() << '\n';
    return kResourceCap;
  } catch (const std::bad_alloc&) {
    err << "odepth: resource cap: out of memory\n";
    return kResourceCap;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "odepth: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "odepth: " << e.what() << '\n';
    return kModuleError;
  }
}

}  // namespace odepth::cli
