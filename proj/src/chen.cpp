#include "odepth/chen.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "odepth/error.hpp"
#include "odepth/kernels.hpp"
#include "odepth/ncseries.hpp"
#include "odepth/ode.hpp"

namespace odepth {

// ---------------------------------------------------------------- Poly2

Poly2::Poly2(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return std::pair(a.i, a.j) < std::pair(b.i, b.j); });
  for (const auto& t : terms) {
    if (t.i < 0 || t.j < 0) throw DomainError("negative exponent in polynomial");
    if (!terms_.empty() && terms_.back().i == t.i && terms_.back().j == t.j)
      terms_.back().c += t.c;
    else
      terms_.push_back(t);
  }
  std::erase_if(terms_, [](const Term& t) { return t.c == cplx(0.0); });
}

Poly2 Poly2::constant(cplx c) { return Poly2({{0, 0, c}}); }
Poly2 Poly2::x() { return Poly2({{1, 0, 1.0}}); }
Poly2 Poly2::y() { return Poly2({{0, 1, 1.0}}); }

bool Poly2::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].i == 0 && terms_[0].j == 0); }

bool Poly2::is_real() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.c.imag() == 0.0; });
}

int Poly2::degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t.i + t.j);
  return d;
}

cplx Poly2::operator()(cplx x, cplx y) const {
  cplx out = 0.0;
  for (const auto& t : terms_) {
    cplx m = t.c;
    for (int k = 0; k < t.i; ++k) m *= x;
    for (int k = 0; k < t.j; ++k) m *= y;
    out += m;
  }
  return out;
}

double Poly2::eval_real(double x, double y) const {
  double out = 0.0;
  for (const auto& t : terms_) {
    double m = t.c.real();
    for (int k = 0; k < t.i; ++k) m *= x;
    for (int k = 0; k < t.j; ++k) m *= y;
    out += m;
  }
  return out;
}

Poly2 Poly2::dx() const {
  std::vector<Term> out;
  for (const auto& t : terms_)
    if (t.i > 0) out.push_back({t.i - 1, t.j, t.c * static_cast<double>(t.i)});
  return Poly2(std::move(out));
}

Poly2 Poly2::dy() const {
  std::vector<Term> out;
  for (const auto& t : terms_)
    if (t.j > 0) out.push_back({t.i, t.j - 1, t.c * static_cast<double>(t.j)});
  return Poly2(std::move(out));
}

Poly2 operator+(const Poly2& a, const Poly2& b) {
  auto terms = a.terms_;
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  return Poly2(std::move(terms));
}

Poly2 operator-(const Poly2& a, const Poly2& b) { return a + cplx(-1.0) * b; }

Poly2 operator*(const Poly2& a, const Poly2& b) {
  std::vector<Poly2::Term> terms;
  for (const auto& s : a.terms_)
    for (const auto& t : b.terms_) terms.push_back({s.i + t.i, s.j + t.j, s.c * t.c});
  return Poly2(std::move(terms));
}

Poly2 operator*(cplx s, const Poly2& a) {
  auto terms = a.terms_;
  for (auto& t : terms) t.c *= s;
  return Poly2(std::move(terms));
}

// ---------------------------------------------------------------- OneForm

OneForm::OneForm(Poly2 p_, Poly2 q_, Poly2 d_) : p(std::move(p_)), q(std::move(q_)), d(std::move(d_)) {
  if (d.is_zero()) throw DomainError("one-form denominator is identically zero");
}

cplx OneForm::operator()(const Point& at, const Point& v) const {
  const cplx num = p(at) * v[0] + q(at) * v[1];
  return is_polynomial() ? num / d.terms()[0].c : num / d(at);
}

Poly2 OneForm::exterior_derivative() const {
  if (!is_polynomial()) throw DomainError("exterior derivative needs a polynomial form");
  return (1.0 / d.terms()[0].c) * (q.dx() - p.dy());
}

// ---------------------------------------------------------------- segments

namespace {

std::array<double, 2> hamiltonian_field(const Poly2& fx, const Poly2& fy, double x, double y) {
  return {fy.eval_real(x, y), -fx.eval_real(x, y)};
}

/// Flows a level segment through the parameter values in `s` (ascending).
std::vector<std::array<double, 2>> flow_level(const LevelSegment& seg, const std::vector<double>& s) {
  const Poly2 fx = seg.hamiltonian.dx(), fy = seg.hamiltonian.dy();
  Dp45 ode(
      2,
      [&](double, const double* y, double* dy) {
        const auto v = hamiltonian_field(fx, fy, y[0], y[1]);
        dy[0] = seg.duration * v[0];
        dy[1] = seg.duration * v[1];
      },
      {.rtol = 1e-13, .atol = 1e-14});
  std::vector<double> y{seg.start[0], seg.start[1]};
  std::vector<std::array<double, 2>> out;
  double at = 0.0;
  for (double target : s) {
    ode.integrate(at, target, y);
    at = target;
    out.push_back({y[0], y[1]});
  }
  return out;
}

Point real_point(const std::array<double, 2>& p) { return {cplx(p[0]), cplx(p[1])}; }

std::vector<cplx> reverse_poly(const std::vector<cplx>& c) {
  // p(1 - s) by binomial expansion.
  std::vector<cplx> out(c.size(), 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    double binom = 1.0;
    for (std::size_t m = 0; m <= k; ++m) {
      out[m] += c[k] * binom * ((m % 2) ? -1.0 : 1.0);
      binom = binom * static_cast<double>(k - m) / static_cast<double>(m + 1);
    }
  }
  return out;
}

}  // namespace

Point segment_point(const Segment& seg, double s) {
  return std::visit(
      [&](const auto& g) -> Point {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PolySegment>) {
          Point out{};
          for (int k = 0; k < 2; ++k) {
            cplx acc = 0.0;
            const auto& c = g.coeffs[static_cast<std::size_t>(k)];
            for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
            out[static_cast<std::size_t>(k)] = acc;
          }
          return out;
        } else if constexpr (std::is_same_v<T, ArcSegment>) {
          const double th = g.theta0 + s * g.sweep;
          return {g.center[0] + g.u[0] * std::cos(th) + g.v[0] * std::sin(th),
                  g.center[1] + g.u[1] * std::cos(th) + g.v[1] * std::sin(th)};
        } else {
          return real_point(flow_level(g, {s})[0]);
        }
      },
      seg);
}

Point segment_velocity(const Segment& seg, double s) {
  return std::visit(
      [&](const auto& g) -> Point {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PolySegment>) {
          Point out{};
          for (int k = 0; k < 2; ++k) {
            cplx acc = 0.0;
            const auto& c = g.coeffs[static_cast<std::size_t>(k)];
            for (std::size_t m = c.size(); m-- > 1;) acc = acc * s + c[m] * static_cast<double>(m);
            out[static_cast<std::size_t>(k)] = acc;
          }
          return out;
        } else if constexpr (std::is_same_v<T, ArcSegment>) {
          const double th = g.theta0 + s * g.sweep;
          return {g.sweep * (-g.u[0] * std::sin(th) + g.v[0] * std::cos(th)),
                  g.sweep * (-g.u[1] * std::sin(th) + g.v[1] * std::cos(th))};
        } else {
          const auto p = flow_level(g, {s})[0];
          const auto v = hamiltonian_field(g.hamiltonian.dx(), g.hamiltonian.dy(), p[0], p[1]);
          return {cplx(g.duration * v[0]), cplx(g.duration * v[1])};
        }
      },
      seg);
}

Segment reverse_segment(const Segment& seg) {
  return std::visit(
      [&](const auto& g) -> Segment {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PolySegment>) {
          return PolySegment{{reverse_poly(g.coeffs[0]), reverse_poly(g.coeffs[1])}};
        } else if constexpr (std::is_same_v<T, ArcSegment>) {
          return ArcSegment{g.center, g.u, g.v, g.theta0 + g.sweep, -g.sweep};
        } else {
          return LevelSegment{g.hamiltonian, flow_level(g, {1.0})[0], -g.duration};
        }
      },
      seg);
}

double distance(const Point& a, const Point& b) { return std::hypot(std::abs(a[0] - b[0]), std::abs(a[1] - b[1])); }

// ---------------------------------------------------------------- Path

Path::Path(std::vector<Segment> segments, bool closed, double join_tol) : segments_(std::move(segments)), closed_(closed) {
  if (segments_.empty()) throw DomainError("path needs at least one segment");
  for (std::size_t k = 0; k + 1 < segments_.size(); ++k) {
    const double gap = distance(segment_point(segments_[k], 1.0), segment_point(segments_[k + 1], 0.0));
    if (gap > join_tol) throw EndpointMismatch("segments " + std::to_string(k) + " and " + std::to_string(k + 1) + " do not join (gap " + std::to_string(gap) + ")");
  }
  if (closed_ && distance(start(), end()) > join_tol) throw EndpointMismatch("closed path does not return to its start");
}

Path Path::constant(const Point& p) { return Path({PolySegment{{std::vector<cplx>{p[0]}, std::vector<cplx>{p[1]}}}}, true); }

Point Path::start() const { return segment_point(segments_.front(), 0.0); }
Point Path::end() const { return segment_point(segments_.back(), 1.0); }

Path Path::reversed() const {
  std::vector<Segment> out;
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) out.push_back(reverse_segment(*it));
  return Path(std::move(out), closed_, 1e-6);
}

Path Path::then(const Path& next, double join_tol) const {
  auto segs = segments_;
  segs.insert(segs.end(), next.segments_.begin(), next.segments_.end());
  const bool closed = distance(start(), next.end()) <= join_tol;
  return Path(std::move(segs), closed, join_tol);
}

std::vector<Point> Path::sample(int per_segment) const {
  if (per_segment < 1) throw DomainError("need at least one sample per segment");
  std::vector<Point> out;
  std::vector<double> s;
  for (int k = 0; k <= per_segment; ++k) s.push_back(static_cast<double>(k) / per_segment);
  for (const auto& seg : segments_) {
    if (const auto* level = std::get_if<LevelSegment>(&seg)) {
      for (const auto& p : flow_level(*level, s)) out.push_back(real_point(p));
    } else {
      for (double v : s) out.push_back(segment_point(seg, v));
    }
  }
  return out;
}

// ---------------------------------------------------------------- ChenState

ChenState::ChenState(int rank, int degree) : rank_(rank), degree_(degree) {
  if (rank < 1 || degree < 0) throw DomainError("bad ChenState shape");
  std::size_t o = 0, w = 1;
  for (int l = 0; l <= degree + 1; ++l) {
    offset_.push_back(o);
    o += w;
    w *= static_cast<std::size_t>(rank);
  }
  data_.assign(offset_.back(), 0.0);
  data_[0] = 1.0;
}

std::size_t ChenState::index(std::span<const int> word) const {
  if (static_cast<int>(word.size()) > degree_) throw DomainError("word longer than the truncation degree");
  std::size_t v = 0;
  for (int l : word) {
    if (l < 1 || l > rank_) throw InvalidLetter("letter out of range: " + std::to_string(l));
    v = v * static_cast<std::size_t>(rank_) + static_cast<std::size_t>(l - 1);
  }
  return offset_[word.size()] + v;
}

ChenState operator*(const ChenState& a, const ChenState& b) {
  if (a.rank_ != b.rank_ || a.degree_ != b.degree_) throw ContextMismatch("ChenState shapes differ");
  ChenState out(a.rank_, a.degree_);
  out.data_[0] = 0.0;
  for (int la = 0; la <= a.degree_; ++la) {
    const std::size_t wa = a.offset_[static_cast<std::size_t>(la) + 1] - a.offset_[static_cast<std::size_t>(la)];
    for (int lb = 0; la + lb <= a.degree_; ++lb) {
      const std::size_t wb = b.offset_[static_cast<std::size_t>(lb) + 1] - b.offset_[static_cast<std::size_t>(lb)];
      kernels::outer_accumulate(a.data_.data() + a.offset(la), wa, b.data_.data() + b.offset(lb), wb,
                                out.data_.data() + out.offset(la + lb));
    }
  }
  return out;
}

ChenState ChenState::inverse() const {
  const cplx c0 = data_[0];
  if (c0 == cplx(0.0)) throw DomainError("series with zero constant term is not invertible");
  ChenState x = *this;
  for (auto& v : x.data_) v /= c0;
  x.data_[0] = 0.0;
  // 1/(1 + x) = 1 - x (1 - x (1 - ...)).
  ChenState r(rank_, degree_);
  for (int k = 0; k < degree_; ++k) {
    ChenState xr = x * r;
    ChenState next(rank_, degree_);
    for (std::size_t i = 0; i < next.data_.size(); ++i) next.data_[i] -= xr.data_[i];
    r = std::move(next);
  }
  for (auto& v : r.data_) v /= c0;
  return r;
}

ChenState ChenState::log() const {
  const cplx c0 = data_[0];
  if (c0 == cplx(0.0)) throw DomainError("log needs a nonzero constant term");
  ChenState x = *this;
  for (auto& v : x.data_) v /= c0;
  x.data_[0] = 0.0;
  ChenState out = x;
  ChenState power = x;
  for (int k = 2; k <= degree_; ++k) {
    power = power * x;
    const double s = ((k % 2) ? 1.0 : -1.0) / k;
    for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] += s * power.data_[i];
  }
  out.data_[0] = std::log(c0);
  return out;
}

double ChenState::shuffle_residual(std::span<const int> u, std::span<const int> v) const {
  if (static_cast<int>(u.size() + v.size()) > degree_) throw DomainError("shuffle exceeds the truncation degree");
  cplx sum = 0.0;
  for (const auto& [w, mult] : shuffle(u, v)) sum += static_cast<double>(mult) * coefficient(w);
  return std::abs(coefficient(u) * coefficient(v) - sum);
}

double ChenState::max_abs_diff(const ChenState& other) const {
  if (rank_ != other.rank_ || degree_ != other.degree_) throw ContextMismatch("ChenState shapes differ");
  double out = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) out = std::max(out, std::abs(data_[i] - other.data_[i]));
  return out;
}

// ---------------------------------------------------------------- transport

FormEval as_eval(const OneForm& form) {
  FormEval out;
  out.value = [form](const Point& at, const Point& v) { return form(at, v); };
  if (!form.is_polynomial()) out.regularity = [d = form.d](const Point& at) { return std::abs(d(at)); };
  return out;
}

namespace {

std::vector<FormEval> as_evals(const std::vector<OneForm>& forms) {
  std::vector<FormEval> out;
  for (const auto& f : forms) out.push_back(as_eval(f));
  return out;
}

void check_regular(const std::vector<FormEval>& forms, const Point& at, double margin) {
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (!forms[i].regularity) continue;
    const double r = forms[i].regularity(at);
    if (!(r >= margin))
      throw PoleProximity("path comes within " + std::to_string(r) + " of a pole of form " + std::to_string(i + 1));
  }
}

/// dS = S (sum_i f_i X_i) on the flat storage of a ChenState.
void chen_rhs(const ChenState& shape, const cplx* s, const cplx* f, cplx* ds) {
  const std::size_t n = static_cast<std::size_t>(shape.rank());
  std::fill(ds, ds + shape.size(), cplx(0.0));
  std::size_t width = 1;
  for (int l = 0; l < shape.degree(); ++l) {
    kernels::outer_accumulate(s + shape.offset(l), width, f, n, ds + shape.offset(l + 1));
    width *= n;
  }
}

}  // namespace

ChenState chen_transport(const Path& path, const std::vector<FormEval>& forms, int degree, const ChenOptions& options) {
  if (forms.empty()) throw DomainError("chen_transport needs at least one form");
  if (degree < 1) throw DomainError("truncation degree must be positive");
  if (!(options.tol > 0)) throw DomainError("tolerance must be positive");
  for (const auto& p : path.sample(options.pole_samples)) check_regular(forms, p, options.pole_margin);

  ChenState state(static_cast<int>(forms.size()), degree);
  const std::size_t m = state.size();
  std::vector<cplx> f(forms.size());
  const OdeOptions ode_options{.rtol = options.tol / 10, .atol = options.tol / 10};

  for (const auto& seg : path.segments()) {
    if (const auto* level = std::get_if<LevelSegment>(&seg)) {
      const Poly2 fx = level->hamiltonian.dx(), fy = level->hamiltonian.dy();
      Dp45 ode(2 + 2 * m,
               [&](double, const double* y, double* dy) {
                 const auto v = hamiltonian_field(fx, fy, y[0], y[1]);
                 dy[0] = level->duration * v[0];
                 dy[1] = level->duration * v[1];
                 const Point at{cplx(y[0]), cplx(y[1])};
                 const Point vel{cplx(dy[0]), cplx(dy[1])};
                 check_regular(forms, at, options.pole_margin);
                 for (std::size_t i = 0; i < forms.size(); ++i) f[i] = forms[i].value(at, vel);
                 chen_rhs(state, reinterpret_cast<const cplx*>(y + 2), f.data(), reinterpret_cast<cplx*>(dy + 2));
               },
               ode_options);
      std::vector<double> y(2 + 2 * m);
      y[0] = level->start[0];
      y[1] = level->start[1];
      std::copy_n(reinterpret_cast<const double*>(state.data().data()), 2 * m, y.begin() + 2);
      ode.integrate(0.0, 1.0, y);
      std::copy_n(y.begin() + 2, 2 * m, reinterpret_cast<double*>(state.data().data()));
    } else {
      Dp45 ode(2 * m,
               [&](double s, const double* y, double* dy) {
                 const Point at = segment_point(seg, s), vel = segment_velocity(seg, s);
                 check_regular(forms, at, options.pole_margin);
                 for (std::size_t i = 0; i < forms.size(); ++i) f[i] = forms[i].value(at, vel);
                 chen_rhs(state, reinterpret_cast<const cplx*>(y), f.data(), reinterpret_cast<cplx*>(dy));
               },
               ode_options);
      std::vector<double> y(reinterpret_cast<const double*>(state.data().data()),
                            reinterpret_cast<const double*>(state.data().data()) + 2 * m);
      ode.integrate(0.0, 1.0, y);
      std::copy(y.begin(), y.end(), reinterpret_cast<double*>(state.data().data()));
    }
  }
  return state;
}

ChenState chen_transport(const Path& path, const std::vector<OneForm>& forms, int degree, const ChenOptions& options) {
  return chen_transport(path, as_evals(forms), degree, options);
}

cplx iterated_integral(const Path& path, const std::vector<FormEval>& forms, const ChenOptions& options) {
  if (forms.empty() || forms.size() > 6) throw DomainError("iterated_integral supports lengths 1 to 6");
  const int l = static_cast<int>(forms.size());
  const ChenState s = chen_transport(path, forms, l, options);
  std::vector<int> word(static_cast<std::size_t>(l));
  for (int k = 0; k < l; ++k) word[static_cast<std::size_t>(k)] = k + 1;
  return s.coefficient(word);
}

cplx iterated_integral(const Path& path, const std::vector<OneForm>& forms, const ChenOptions& options) {
  return iterated_integral(path, as_evals(forms), options);
}

Path word_path(const std::map<int, Path>& loops, const Word& w, double join_tol) {
  if (loops.empty()) throw DomainError("word_path needs at least one loop");
  const Point base = loops.begin()->second.start();
  for (const auto& [g, loop] : loops) {
    if (distance(loop.start(), base) > join_tol || distance(loop.end(), base) > join_tol)
      throw EndpointMismatch("loop " + std::to_string(g) + " does not start and end at the common base point");
  }
  std::optional<Path> out;
  for (int l : w.letters()) {
    auto it = loops.find(std::abs(l));
    if (it == loops.end()) throw DomainError("no loop for generator " + std::to_string(std::abs(l)));
    Path piece = l > 0 ? it->second : it->second.reversed();
    out = out ? out->then(piece, join_tol) : piece;
  }
  return out ? *out : Path::constant(base);
}

double fiber_check(const Path& path, const Poly2& f, cplx t0, int per_segment) {
  double out = 0.0;
  for (const auto& p : path.sample(per_segment)) out = std::max(out, std::abs(f(p) - t0));
  return out;
}

}  // namespace odepth
