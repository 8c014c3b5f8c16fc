#pragma once

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <span>
#include <variant>
#include <vector>

#include "odepth/word.hpp"

namespace odepth {

using cplx = std::complex<double>;
using Point = std::array<cplx, 2>;

/// Bivariate polynomial sum c x^i y^j with complex coefficients, kept sorted
/// by (i, j) with zero terms dropped.
class Poly2 {
 public:
  struct Term {
    int i = 0;
    int j = 0;
    cplx c;
    friend bool operator==(const Term&, const Term&) = default;
  };

  Poly2() = default;
  explicit Poly2(std::vector<Term> terms);
  static Poly2 constant(cplx c);
  static Poly2 x();
  static Poly2 y();

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_real() const;
  int degree() const;

  cplx operator()(cplx x, cplx y) const;
  cplx operator()(const Point& p) const { return (*this)(p[0], p[1]); }
  /// Evaluation at a real point using the real parts of the coefficients.
  double eval_real(double x, double y) const;

  Poly2 dx() const;
  Poly2 dy() const;

  friend Poly2 operator+(const Poly2& a, const Poly2& b);
  friend Poly2 operator-(const Poly2& a, const Poly2& b);
  friend Poly2 operator*(const Poly2& a, const Poly2& b);
  friend Poly2 operator*(cplx s, const Poly2& a);
  friend bool operator==(const Poly2&, const Poly2&) = default;

 private:
  std::vector<Term> terms_;
};

/// The form (P dx + Q dy) / D.
struct OneForm {
  Poly2 p;
  Poly2 q;
  Poly2 d = Poly2::constant(1.0);

  OneForm() = default;
  OneForm(Poly2 p_, Poly2 q_, Poly2 d_ = Poly2::constant(1.0));

  bool is_polynomial() const { return d.is_constant(); }
  /// Value on the tangent vector v at p.
  cplx operator()(const Point& at, const Point& v) const;
  /// A with d(form) = A dx^dy; polynomial forms only.
  Poly2 exterior_derivative() const;
  OneForm operator-() const { return OneForm(Poly2::constant(-1.0) * p, Poly2::constant(-1.0) * q, d); }
};

/// Coefficients of p(s) = sum c_k s^k per coordinate, s in [0, 1].
struct PolySegment {
  std::array<std::vector<cplx>, 2> coeffs;
};

/// p(s) = center + u cos(theta) + v sin(theta), theta = theta0 + s sweep.
struct ArcSegment {
  Point center;
  Point u;
  Point v;
  double theta0 = 0.0;
  double sweep = 0.0;
};

/// Real trajectory of the Hamiltonian field (F_y, -F_x) from `start` for
/// time `duration` (negative: backwards), reparametrized to s in [0, 1].
struct LevelSegment {
  Poly2 hamiltonian;
  std::array<double, 2> start{};
  double duration = 0.0;
};

using Segment = std::variant<PolySegment, ArcSegment, LevelSegment>;

Point segment_point(const Segment& seg, double s);
Point segment_velocity(const Segment& seg, double s);
Segment reverse_segment(const Segment& seg);

class Path {
 public:
  /// Throws EndpointMismatch if consecutive segments (or the ends of a closed
  /// path) are more than join_tol apart.
  Path(std::vector<Segment> segments, bool closed, double join_tol = 1e-9);
  static Path constant(const Point& p);

  const std::vector<Segment>& segments() const { return segments_; }
  bool closed() const { return closed_; }
  Point start() const;
  Point end() const;

  /// Same trace traversed backwards.
  Path reversed() const;
  /// This path followed by `next`.
  Path then(const Path& next, double join_tol = 1e-9) const;

  /// Points at `per_segment` uniformly spaced parameters of every segment.
  std::vector<Point> sample(int per_segment) const;

 private:
  std::vector<Segment> segments_;
  bool closed_ = false;
};

double distance(const Point& a, const Point& b);

/// Truncated series with complex coefficients. Word layout matches the exact
/// series: words of length l start at offset(l) and are ordered in base n
/// with the first letter most significant.
class ChenState {
 public:
  ChenState(int rank, int degree);  // the unit series

  int rank() const { return rank_; }
  int degree() const { return degree_; }
  std::size_t size() const { return data_.size(); }
  std::size_t offset(int length) const { return offset_[static_cast<std::size_t>(length)]; }
  std::size_t index(std::span<const int> word) const;

  cplx coefficient(std::span<const int> word) const { return data_[index(word)]; }
  cplx coefficient(std::initializer_list<int> word) const {
    return coefficient(std::span<const int>(word.begin(), word.size()));
  }
  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

  friend ChenState operator*(const ChenState& a, const ChenState& b);
  ChenState inverse() const;
  /// Truncated logarithm; needs constant term 1.
  ChenState log() const;

  /// |c(u) c(v) - sum over shuffles w of u and v of c(w)|.
  double shuffle_residual(std::span<const int> u, std::span<const int> v) const;
  double max_abs_diff(const ChenState& other) const;

 private:
  int rank_;
  int degree_;
  std::vector<std::size_t> offset_;
  std::vector<cplx> data_;
};

/// A one-form as a function on tangent vectors, with an optional regularity
/// measure (|D| for rational forms) that must stay above the pole margin.
struct FormEval {
  std::function<cplx(const Point& at, const Point& v)> value;
  std::function<double(const Point& at)> regularity;
};

FormEval as_eval(const OneForm& form);

struct ChenOptions {
  double tol = 1e-10;
  double pole_margin = 1e-3;
  int pole_samples = 1024;
};

/// S(1) for S' = S (sum_i f_i X_i), S(0) = 1, f_i the pullback of form i.
/// Throws PoleProximity or StepUnderflow.
ChenState chen_transport(const Path& path, const std::vector<FormEval>& forms, int degree,
                         const ChenOptions& options = {});
ChenState chen_transport(const Path& path, const std::vector<OneForm>& forms, int degree,
                         const ChenOptions& options = {});

/// Integral of forms[0] forms[1] ... along the path (first form innermost).
cplx iterated_integral(const Path& path, const std::vector<FormEval>& forms, const ChenOptions& options = {});
cplx iterated_integral(const Path& path, const std::vector<OneForm>& forms, const ChenOptions& options = {});

/// Concatenation of the loops named by the letters of w (inverse letters
/// reversed). Throws EndpointMismatch if the loops do not share a base point.
Path word_path(const std::map<int, Path>& loops, const Word& w, double join_tol = 1e-9);

/// Sampled max |F(p(s)) - t0| along the path.
double fiber_check(const Path& path, const Poly2& f, cplx t0, int per_segment = 2000);

}  // namespace odepth
