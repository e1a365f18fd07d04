#pragma once

// Finite-evidence verifier for proper interactive P-tuples of subsets of a
// set X under a group action, plus a replay of the ping-pong induction on
// alternating words. Nothing here proves injectivity beyond the enumerated
// depth.

#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <omp.h>

namespace veechcomb {

struct ConditionReport {
  int condition = 0;
  std::string name;
  bool pass = true;
  long checks = 0;
  std::string witness;  // empty when passing
  std::string evidence = "samples";
};

struct ReplayReport {
  int depth = 0;
  long words = 0;
  bool pass = true;
  std::string witness;
};

struct PingPongReport {
  std::vector<ConditionReport> conditions;
  ReplayReport replay;
  std::string scope = "finite evidence: sampled points and enumerated words only";

  bool pass() const {
    for (const auto& c : conditions)
      if (!c.pass) return false;
    return replay.pass;
  }
};

template <class Elem, class Point>
struct PingPongProblem {
  // Action oracle. compose(a, b) acts as a after b.
  std::function<Point(const Elem&, const Point&)> apply;
  std::function<Elem(const Elem&)> inverse;
  std::function<Elem(const Elem&, const Elem&)> compose;
  std::function<bool(const Elem&)> is_identity;
  std::function<std::string(const Point&)> describe_point = [](const Point&) { return std::string("<point>"); };

  std::vector<std::function<bool(const Point&)>> theta;
  std::vector<std::vector<Point>> samples;  // claimed members of each region
  std::vector<std::optional<Point>> witnesses;
  std::vector<Elem> edge_generators;
  // Elements of G_i \ G_0 used as syllables, with printable labels.
  std::vector<std::vector<Elem>> syllables;
  std::vector<std::vector<std::string>> syllable_labels;
  int word_depth = 0;
  bool parallel = true;
};

namespace pingpong_detail {

inline ConditionReport make_condition(int n, std::string name) {
  ConditionReport c;
  c.condition = n;
  c.name = std::move(name);
  return c;
}

template <class Elem, class Point>
struct Failure {
  bool found = false;
  std::string witness;
};

// Depth-first replay of all alternating words ending with syllable (last, j).
// Words are extended on the left; `point` tracks the image of a start point
// lying in a region other than the last factor's.
template <class Elem, class Point>
void replay_from(const PingPongProblem<Elem, Point>& pb, int last, std::size_t j, long& words,
                 Failure<Elem, Point>& fail) {
  const int P = static_cast<int>(pb.theta.size());
  int start_region = last == 0 ? 1 : 0;
  if (pb.samples[start_region].empty()) {
    fail = {true, "no sample to track in region " + std::to_string(start_region + 1)};
    return;
  }
  const Point& x0 = pb.samples[start_region].front();

  struct Frame {
    Elem m;
    Point y;
    int first;
    int len;
    std::string label;
  };
  std::vector<Frame> stack;
  const Elem& s = pb.syllables[last][j];
  stack.push_back({s, pb.apply(s, x0), last, 1, pb.syllable_labels[last][j]});
  while (!stack.empty() && !fail.found) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    ++words;
    if (!pb.theta[f.first](f.y)) {
      fail = {true, "tracked point " + pb.describe_point(f.y) + " left region " + std::to_string(f.first + 1) +
                        " for word " + f.label};
      return;
    }
    if (pb.is_identity(f.m)) {
      fail = {true, "word acts as the identity: " + f.label};
      return;
    }
    if (f.len >= pb.word_depth) continue;
    for (int i = P - 1; i >= 0; --i) {
      if (i == f.first) continue;
      for (std::size_t k = pb.syllables[i].size(); k-- > 0;) {
        const Elem& t = pb.syllables[i][k];
        stack.push_back({pb.compose(t, f.m), pb.apply(t, f.y), i, f.len + 1, pb.syllable_labels[i][k] + " " + f.label});
      }
    }
  }
}

}  // namespace pingpong_detail

template <class Elem, class Point>
PingPongReport pingpong_check(const PingPongProblem<Elem, Point>& pb) {
  const int P = static_cast<int>(pb.theta.size());
  if (P < 2) throw std::invalid_argument("ping-pong needs at least two regions");
  if (static_cast<int>(pb.samples.size()) != P || static_cast<int>(pb.syllables.size()) != P ||
      static_cast<int>(pb.syllable_labels.size()) != P)
    throw std::invalid_argument("one sample set and one syllable set per region are required");
  if (static_cast<int>(pb.witnesses.size()) != P) throw std::invalid_argument("missing witnesses");
  for (const auto& w : pb.witnesses)
    if (!w) throw std::invalid_argument("missing witness point for condition 5");

  PingPongReport rep;
  auto fail = [](ConditionReport& c, std::string w) {
    if (c.pass) {
      c.pass = false;
      c.witness = std::move(w);
    }
  };

  ConditionReport c1 = pingpong_detail::make_condition(1, "regions nonempty");
  for (int i = 0; i < P; ++i) {
    ++c1.checks;
    if (pb.samples[i].empty()) fail(c1, "region " + std::to_string(i + 1) + " has no sample");
    for (const auto& x : pb.samples[i])
      if (!pb.theta[i](x)) fail(c1, "sample " + pb.describe_point(x) + " is not in region " + std::to_string(i + 1));
    if (!pb.theta[i](*pb.witnesses[i]))
      fail(c1, "witness " + pb.describe_point(*pb.witnesses[i]) + " is not in region " + std::to_string(i + 1));
  }
  rep.conditions.push_back(c1);

  ConditionReport c2 = pingpong_detail::make_condition(2, "regions pairwise disjoint");
  for (int i = 0; i < P; ++i)
    for (int k = 0; k < P; ++k) {
      if (i == k) continue;
      for (const auto& x : pb.samples[i]) {
        ++c2.checks;
        if (pb.theta[k](x))
          fail(c2, "point " + pb.describe_point(x) + " lies in regions " + std::to_string(i + 1) + " and " +
                       std::to_string(k + 1));
      }
    }
  rep.conditions.push_back(c2);

  ConditionReport c3 = pingpong_detail::make_condition(3, "edge group leaves each region invariant");
  for (const auto& g : pb.edge_generators)
    for (const Elem& e : {g, pb.inverse(g)})
      for (int i = 0; i < P; ++i)
        for (const auto& x : pb.samples[i]) {
          ++c3.checks;
          Point y = pb.apply(e, x);
          if (!pb.theta[i](y))
            fail(c3, "edge element moves " + pb.describe_point(x) + " out of region " + std::to_string(i + 1));
        }
  rep.conditions.push_back(c3);

  ConditionReport c4 = pingpong_detail::make_condition(4, "factor elements map other regions inside their own");
  for (int i = 0; i < P; ++i)
    for (std::size_t j = 0; j < pb.syllables[i].size(); ++j)
      for (int k = 0; k < P; ++k) {
        if (k == i) continue;
        for (const auto& x : pb.samples[k]) {
          ++c4.checks;
          Point y = pb.apply(pb.syllables[i][j], x);
          if (!pb.theta[i](y))
            fail(c4, pb.syllable_labels[i][j] + " maps " + pb.describe_point(x) + " to " + pb.describe_point(y) +
                         " outside region " + std::to_string(i + 1));
        }
      }
  rep.conditions.push_back(c4);

  // Exact for the listed syllables: theta_i in phi(Theta_k) iff phi^-1(theta_i) in Theta_k.
  ConditionReport c5 = pingpong_detail::make_condition(5, "witness points avoid the images");
  c5.evidence = "exact for listed syllables";
  for (int i = 0; i < P; ++i)
    for (std::size_t j = 0; j < pb.syllables[i].size(); ++j) {
      Point y = pb.apply(pb.inverse(pb.syllables[i][j]), *pb.witnesses[i]);
      for (int k = 0; k < P; ++k) {
        if (k == i) continue;
        ++c5.checks;
        if (pb.theta[k](y))
          fail(c5, "witness " + pb.describe_point(*pb.witnesses[i]) + " lies in " + pb.syllable_labels[i][j] +
                       " of region " + std::to_string(k + 1));
      }
    }
  rep.conditions.push_back(c5);

  // Replay, one task per final syllable; results merged in task order.
  rep.replay.depth = pb.word_depth;
  if (pb.word_depth > 0) {
    std::vector<std::pair<int, std::size_t>> roots;
    for (int i = 0; i < P; ++i)
      for (std::size_t j = 0; j < pb.syllables[i].size(); ++j) roots.emplace_back(i, j);
    std::vector<long> counts(roots.size(), 0);
    std::vector<pingpong_detail::Failure<Elem, Point>> fails(roots.size());
    const long n = static_cast<long>(roots.size());
    std::vector<std::exception_ptr> errors(roots.size());
#pragma omp parallel for schedule(dynamic) if (pb.parallel)
    for (long r = 0; r < n; ++r) {
      try {
        pingpong_detail::replay_from(pb, roots[r].first, roots[r].second, counts[r], fails[r]);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
    for (std::size_t r = 0; r < roots.size(); ++r) {
      rep.replay.words += counts[r];
      if (fails[r].found && rep.replay.pass) {
        rep.replay.pass = false;
        rep.replay.witness = fails[r].witness;
      }
    }
  }
  return rep;
}

}  // namespace veechcomb
