#include "veechcomb/kleinian.hpp"

#include <algorithm>
#include <random>

namespace veechcomb {

namespace {

struct Overflow : std::overflow_error {
  Overflow() : std::overflow_error("integer overflow") {}
};

// Checked machine integers; an overflow aborts the fast path and the model is
// recomputed with GMP integers.
template <class T>
struct Checked {
  T v = 0;
  Checked() = default;
  Checked(T x) : v(x) {}
  friend Checked operator+(Checked a, Checked b) {
    T r;
    if (__builtin_add_overflow(a.v, b.v, &r)) throw Overflow();
    return r;
  }
  friend Checked operator-(Checked a, Checked b) {
    T r;
    if (__builtin_sub_overflow(a.v, b.v, &r)) throw Overflow();
    return r;
  }
  friend Checked operator*(Checked a, Checked b) {
    T r;
    if (__builtin_mul_overflow(a.v, b.v, &r)) throw Overflow();
    return r;
  }
  Checked operator-() const { return Checked(0) - *this; }
  friend bool operator==(Checked a, Checked b) { return a.v == b.v; }
  int sign() const { return (v > 0) - (v < 0); }
};

using I64 = Checked<long>;
using I128 = Checked<__int128>;

template <class I>
struct Arith;

template <>
struct Arith<I64> {
  using W = I128;
  static W wide(I64 x) { return W(static_cast<__int128>(x.v)); }
  static I64 narrow(const Integer& z) {
    if (!z.fits_slong_p()) throw Overflow();
    return I64(z.get_si());
  }
  static W wide_of(const Integer& z) { return wide(narrow(z)); }
  static Integer to_mpz(I64 x) { return Integer(x.v); }
  static int sign(W x) { return x.sign(); }
  static constexpr const char* name = "int64";
};

template <>
struct Arith<Integer> {
  using W = Integer;
  static W wide(const Integer& x) { return x; }
  static Integer narrow(const Integer& z) { return z; }
  static W wide_of(const Integer& z) { return z; }
  static Integer to_mpz(const Integer& x) { return x; }
  static int sign(const W& x) { return sgn(x); }
  static constexpr const char* name = "mpz";
};

template <class I>
struct GI {
  I re, im;
  friend GI operator+(const GI& a, const GI& b) { return {a.re + b.re, a.im + b.im}; }
  friend GI operator-(const GI& a, const GI& b) { return {a.re - b.re, a.im - b.im}; }
  friend GI operator*(const GI& a, const GI& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
  friend bool operator==(const GI& a, const GI& b) { return a.re == b.re && a.im == b.im; }
  bool is_zero() const { return *this == GI{I(0), I(0)}; }
};

template <class I>
struct Mat {
  GI<I> a, b, c, d;
  friend Mat operator*(const Mat& x, const Mat& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  Mat adj() const {
    GI<I> z{I(0), I(0)};
    return {d, z - b, z - c, a};
  }
  bool is_scalar() const { return b.is_zero() && c.is_zero() && a == d; }
};

// Point [u : v] of the Riemann sphere.
template <class I>
struct Pt {
  GI<I> u, v;
};

template <class I>
Pt<I> act(const Mat<I>& m, const Pt<I>& p) {
  return {m.a * p.u + m.b * p.v, m.c * p.u + m.d * p.v};
}

// Exact Gaussian-integer matrices built with GMP before narrowing.
struct ZMat {
  Integer ar, ai, br, bi, cr, ci, dr, di;
};

ZMat zmul(const ZMat& x, const ZMat& y) {
  auto m = [](const Integer& pr, const Integer& pi, const Integer& qr, const Integer& qi, Integer& rr, Integer& ri) {
    rr = pr * qr - pi * qi;
    ri = pr * qi + pi * qr;
  };
  ZMat r;
  Integer t1r, t1i, t2r, t2i;
  m(x.ar, x.ai, y.ar, y.ai, t1r, t1i), m(x.br, x.bi, y.cr, y.ci, t2r, t2i), r.ar = t1r + t2r, r.ai = t1i + t2i;
  m(x.ar, x.ai, y.br, y.bi, t1r, t1i), m(x.br, x.bi, y.dr, y.di, t2r, t2i), r.br = t1r + t2r, r.bi = t1i + t2i;
  m(x.cr, x.ci, y.ar, y.ai, t1r, t1i), m(x.dr, x.di, y.cr, y.ci, t2r, t2i), r.cr = t1r + t2r, r.ci = t1i + t2i;
  m(x.cr, x.ci, y.br, y.bi, t1r, t1i), m(x.dr, x.di, y.dr, y.di, t2r, t2i), r.dr = t1r + t2r, r.di = t1i + t2i;
  return r;
}

ZMat zreal(const IntMatrix& m) { return {m[0], 0, m[1], 0, m[2], 0, m[3], 0}; }

ZMat zinv(const IntMatrix& m) { return zreal({m[3], -m[1], -m[2], m[0]}); }

ZMat zcontent_reduce(ZMat m) {
  Integer g = 0;
  for (const Integer* x : {&m.ar, &m.ai, &m.br, &m.bi, &m.cr, &m.ci, &m.dr, &m.di}) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x->get_mpz_t());
  if (g > 1)
    for (Integer* x : {&m.ar, &m.ai, &m.br, &m.bi, &m.cr, &m.ci, &m.dr, &m.di}) *x /= g;
  return m;
}

bool zequal_pm(const ZMat& x, const ZMat& y) {
  auto same = x.ar == y.ar && x.ai == y.ai && x.br == y.br && x.bi == y.bi && x.cr == y.cr && x.ci == y.ci &&
              x.dr == y.dr && x.di == y.di;
  auto neg = x.ar == -y.ar && x.ai == -y.ai && x.br == -y.br && x.bi == -y.bi && x.cr == -y.cr && x.ci == -y.ci &&
             x.dr == -y.dr && x.di == -y.di;
  return same || neg;
}

template <class I>
Mat<I> narrow(const ZMat& m) {
  using A = Arith<I>;
  return {{A::narrow(m.ar), A::narrow(m.ai)},
          {A::narrow(m.br), A::narrow(m.bi)},
          {A::narrow(m.cr), A::narrow(m.ci)},
          {A::narrow(m.dr), A::narrow(m.di)}};
}

struct Syllable {
  ZMat m;
  std::string label;
};

// Distinct elements outside the parabolic subgroup (c != 0) from reduced
// words of length <= L in the generators and their inverses.
std::vector<Syllable> enumerate_syllables(const std::vector<NamedGenerator>& gens, int L) {
  struct Letter {
    ZMat m;
    std::string name;
    int gen;
    int sign;
  };
  std::vector<Letter> letters;
  for (int i = 0; i < static_cast<int>(gens.size()); ++i) {
    letters.push_back({zreal(gens[i].m), gens[i].name, i, 1});
    letters.push_back({zinv(gens[i].m), gens[i].name + "^-1", i, -1});
  }
  std::vector<Syllable> out;
  struct Node {
    ZMat m;
    std::string label;
    int last_gen, last_sign, len;
  };
  std::vector<Node> frontier{{zreal({1, 0, 0, 1}), "", -1, 0, 0}};
  for (int len = 1; len <= L; ++len) {
    std::vector<Node> next;
    for (const auto& n : frontier)
      for (const auto& l : letters) {
        if (l.gen == n.last_gen && l.sign == -n.last_sign) continue;
        Node c{zmul(n.m, l.m), n.label.empty() ? l.name : n.label + " " + l.name, l.gen, l.sign, len};
        next.push_back(c);
        if (sgn(c.m.cr) == 0 && sgn(c.m.ci) == 0) continue;
        bool dup = std::any_of(out.begin(), out.end(), [&](const Syllable& s) { return zequal_pm(s.m, c.m); });
        if (!dup) out.push_back({c.m, c.label});
      }
    frontier = std::move(next);
  }
  return out;
}

// h^k g h^-k scaled to Gaussian integers; kmu = (pr + pi i) / D.
ZMat conjugate_by_shear(const ZMat& g, const Integer& pr, const Integer& pi, const Integer& D) {
  ZMat h{D, 0, pr, pi, 0, 0, D, 0};
  ZMat hi{D, 0, -pr, -pi, 0, 0, D, 0};
  return zcontent_reduce(zmul(zmul(h, g), hi));
}

template <class I>
struct Model {
  using A = Arith<I>;
  using W = typename A::W;

  // Sign of Im(z) - r/s for z = u/v (v != 0).
  static int cmp_im(const Pt<I>& p, const Rational& bound) {
    W ur = A::wide(p.u.re), ui = A::wide(p.u.im), vr = A::wide(p.v.re), vi = A::wide(p.v.im);
    W im = ui * vr - ur * vi;  // Im(u conj v)
    W n2 = vr * vr + vi * vi;
    W r = A::wide_of(bound.get_num()), s = A::wide_of(bound.get_den());
    return A::sign(s * im - r * n2);
  }
  static bool finite(const Pt<I>& p) { return !p.v.is_zero(); }

  static bool in_region(const Region& R, const Pt<I>& p) {
    if (!finite(p)) return false;
    Rational lo = R.centre - R.width, hi = R.centre + R.width;
    switch (R.kind) {
      case RegionKind::strip: return cmp_im(p, lo) >= 0 && cmp_im(p, hi) <= 0;
      case RegionKind::horoball_pair: return cmp_im(p, hi) > 0 || cmp_im(p, lo) < 0;
      case RegionKind::halfplane: return cmp_im(p, hi) > 0;
    }
    return false;
  }

  static GaussianRational to_gaussian(const Pt<I>& p) {
    GaussianRational u(Rational(A::to_mpz(p.u.re)), Rational(A::to_mpz(p.u.im)));
    GaussianRational v(Rational(A::to_mpz(p.v.re)), Rational(A::to_mpz(p.v.im)));
    return u / v;
  }
  static std::string describe(const Pt<I>& p) { return finite(p) ? to_gaussian(p).to_string() : "inf"; }

  static Pt<I> from_gaussian(const GaussianRational& z) {
    Integer D = lcm(z.re.get_den(), z.im.get_den());
    Integer re = z.re.get_num() * (D / z.re.get_den()), im = z.im.get_num() * (D / z.im.get_den());
    return {{A::narrow(re), A::narrow(im)}, {A::narrow(D), I(0)}};
  }

  static KleinianReport run(const KleinianOptions& opt, long K) {
    KleinianReport rep;
    rep.min_power = K;
    rep.precondition_ok = opt.k >= K;
    rep.arithmetic = A::name;

    GaussianRational kmu(opt.k * opt.mu.re, opt.k * opt.mu.im);
    Integer D = lcm(kmu.re.get_den(), kmu.im.get_den());
    Integer pr = kmu.re.get_num() * (D / kmu.re.get_den()), pi = kmu.im.get_num() * (D / kmu.im.get_den());

    Region theta1 = standard_strip();
    Region theta2{RegionKind::strip, 1, kmu.im};
    Region H = standard_horoballs();

    auto s1 = enumerate_syllables(opt.g1, opt.syllable_length);
    auto s2 = enumerate_syllables(opt.g2, opt.syllable_length);
    rep.syllables_g1 = s1.size();
    rep.syllables_g2 = s2.size();

    // Precondition and the two set containments, decided on the strip bounds.
    {
      SetCheck pre;
      pre.name = "precondition k >= K";
      pre.pass = rep.precondition_ok;
      pre.checks = 1;
      if (!pre.pass)
        pre.witness = "k = " + std::to_string(opt.k) + " < K = " + std::to_string(K);
      rep.set_checks.push_back(pre);
    }
    auto strip_in_H = [&](const Rational& centre, const std::string& name, bool shift_back) {
      SetCheck c;
      c.name = name;
      c.checks = 1;
      Rational lo = centre - 1, hi = centre + 1;
      if (!(H.contains_imaginary_part(lo) && H.contains_imaginary_part(hi) && (sgn(lo) > 0 || sgn(hi) < 0))) {
        c.pass = false;
        Rational y = std::max(lo, Rational(-1));
        // A point of the shifted strip outside H, reported in the original coordinates.
        GaussianRational z = shift_back ? GaussianRational(0, y + kmu.im) : GaussianRational(kmu.re, y);
        c.witness = "z = " + z.to_string();
      }
      return c;
    };
    rep.set_checks.push_back(strip_in_H(kmu.im, "h^k(Theta) subset H", false));
    rep.set_checks.push_back(strip_in_H(-kmu.im, "Theta subset h^k(H)", true));

    // Samples: boundary points, random interior points, translates under the edge group.
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<int> xr(-32, 32), yr(-16, 16), coin(0, 3), shift(-3, 3);
    std::vector<GaussianRational> base{GaussianRational(0), GaussianRational(0, 1), GaussianRational(0, -1)};
    while (static_cast<int>(base.size()) < opt.samples) {
      if (base.size() % 5 == 4) {
        GaussianRational prev = base.back();
        base.push_back({prev.re + shift(rng), prev.im});
        continue;
      }
      int y = coin(rng) == 0 ? (coin(rng) < 2 ? 16 : -16) : yr(rng);
      base.push_back({Rational(xr(rng), 4), Rational(y, 16)});
    }
    for (auto& z : base) z.re.canonicalize(), z.im.canonicalize();

    Mat<I> hk = narrow<I>(ZMat{D, 0, pr, pi, 0, 0, D, 0});
    std::vector<Pt<I>> samp1, samp2;
    for (const auto& z : base) {
      samp1.push_back(from_gaussian(z));
      samp2.push_back(act(hk, samp1.back()));
    }

    // Joergensen containment phi(H) subset Theta, sampled.
    {
      SetCheck j;
      j.name = "phi(H) subset Theta for factor elements";
      j.evidence = "sampled evidence";
      std::vector<Pt<I>> hs;
      for (int i = 0; i < opt.samples; ++i) {
        int y = 17 + (i % 48);
        hs.push_back(from_gaussian({Rational(xr(rng), 4), Rational(i % 2 ? y : -y, 16)}));
      }
      for (const auto* set : {&s1, &s2})
        for (const auto& s : *set) {
          Mat<I> m = narrow<I>(s.m);
          for (const auto& p : hs) {
            ++j.checks;
            Pt<I> q = act(m, p);
            if (j.pass && !in_region(theta1, q)) {
              j.pass = false;
              j.witness = s.label + " maps " + describe(p) + " to " + describe(q);
            }
          }
        }
      rep.set_checks.push_back(j);
    }

    PingPongProblem<Mat<I>, Pt<I>> pb;
    pb.apply = [](const Mat<I>& m, const Pt<I>& p) { return act(m, p); };
    pb.inverse = [](const Mat<I>& m) { return m.adj(); };
    pb.compose = [](const Mat<I>& x, const Mat<I>& y) { return x * y; };
    pb.is_identity = [](const Mat<I>& m) { return m.is_scalar(); };
    pb.describe_point = [](const Pt<I>& p) { return describe(p); };
    pb.theta = {[theta1](const Pt<I>& p) { return in_region(theta1, p); },
                [theta2](const Pt<I>& p) { return in_region(theta2, p); }};
    pb.samples = {samp1, samp2};
    pb.witnesses = {from_gaussian(GaussianRational(0)), from_gaussian(kmu)};
    for (const auto& e : opt.edge) pb.edge_generators.push_back(narrow<I>(zreal(e.m)));
    pb.syllables.resize(2);
    pb.syllable_labels.resize(2);
    for (const auto& s : s1) {
      pb.syllables[0].push_back(narrow<I>(s.m));
      pb.syllable_labels[0].push_back("[" + s.label + "]");
    }
    for (const auto& s : s2) {
      pb.syllables[1].push_back(narrow<I>(conjugate_by_shear(s.m, pr, pi, D)));
      pb.syllable_labels[1].push_back("h^k[" + s.label + "]h^-k");
    }
    pb.word_depth = opt.depth;
    pb.parallel = opt.parallel;
    rep.pingpong = pingpong_check(pb);

    rep.assumptions = {
        "the shared parabolic generates the maximal parabolic subgroup of both factors (declared, not verified)",
        "phi(H) subset Theta is checked on samples only",
        "conditions 3 and 4 are checked on samples; condition 5 is exact for the listed syllables",
    };
    return rep;
  }
};

}  // namespace

bool KleinianReport::pass() const {
  for (const auto& c : set_checks)
    if (!c.pass) return false;
  return pingpong.pass();
}

KleinianReport kleinian_model(const KleinianOptions& opt) {
  long K = min_shear_power(opt.mu);
  if (opt.samples < 3) throw std::invalid_argument("at least 3 samples are required");
  if (opt.depth < 0 || opt.syllable_length < 1) throw std::invalid_argument("depth and syllable length must be positive");
  try {
    return Model<I64>::run(opt, K);
  } catch (const Overflow&) {
    return Model<Integer>::run(opt, K);
  }
}

}  // namespace veechcomb
