#include "veechcomb/shell.hpp"

#include "veechcomb/kleinian.hpp"
#include "veechcomb/veech.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <random>
#include <sstream>

namespace veechcomb {

namespace {

// Failure with a chosen exit code and a payload describing it.
struct CommandFailure : std::runtime_error {
  int code;
  Json detail;
  CommandFailure(int c, const std::string& msg, Json d = Json::object())
      : std::runtime_error(msg), code(c), detail(std::move(d)) {}
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<Rational> parse_rationals(const std::string& text, std::size_t n, const char* what) {
  auto parts = split(text, ',');
  if (parts.size() != n)
    throw std::invalid_argument(std::string(what) + " needs " + std::to_string(n) + " comma-separated rationals");
  std::vector<Rational> out;
  for (const auto& p : parts) out.push_back(parse_rational(p));
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

Json matrix_json(const RealMoebius& m) {
  return Json::array({element_json(m.a), element_json(m.b), element_json(m.c), element_json(m.d)});
}

Json certificate_json(const ClassificationCertificate& c) {
  Json j;
  j["word"] = c.word;
  j["matrix"] = c.matrix;
  j["trace"] = {{"exact", c.trace}, {"approx", c.trace_approx}};
  j["kind"] = to_string(c.kind);
  j["verdict"] = to_string(c.verdict);
  if (c.verdict == Verdict::finite_order) j["order"] = c.order;
  j["basis"] = c.basis;
  j["nu"] = {c.nu.first, c.nu.second};
  j["in_kernel"] = c.in_kernel;
  j["peripheral"] = c.peripheral;
  if (!c.normal_form.empty()) j["normal_form"] = c.normal_form;
  if (!c.conjugator.empty()) j["conjugator"] = c.conjugator;
  j["citations"] = c.citations;
  return j;
}

Json surface_summary(const HalfTranslationSurface& s) {
  auto inv = surface_invariants(s);
  Json cones = Json::array();
  for (const auto& cp : s.cone_points())
    cones.push_back({{"id", cp.id}, {"multiple", cp.multiple}, {"angle", std::to_string(cp.multiple) + "pi"},
                     {"marked", cp.marked}});
  return {{"genus", inv.genus},
          {"euler_char", inv.euler_char},
          {"cone_points", cones},
          {"gauss_bonnet", inv.gauss_bonnet},
          {"area", element_json(s.area())},
          {"polygons", s.polygons().size()},
          {"edges", s.edge_count()},
          {"field", field_json(s.field())}};
}

Json oriented_json(const std::vector<OrientedConnection>& cyc) {
  Json out = Json::array();
  for (const auto& oc : cyc) out.push_back({{"index", oc.index}, {"reversed", oc.reversed}});
  return out;
}

Json decomposition_json(const AnnularDecomposition& dec) {
  Json spine = Json::array();
  for (const auto& sc : dec.spine) spine.push_back(saddle_json(sc));
  Json cyls = Json::array();
  for (std::size_t i = 0; i < dec.cylinders.size(); ++i) {
    const auto& c = dec.cylinders[i];
    cyls.push_back({{"circumference", element_json(c.circumference)},
                    {"width", element_json(c.width)},
                    {"area", element_json(c.area)},
                    {"modulus", element_json(dec.modulus(static_cast<int>(i)))},
                    {"bottom", oriented_json(c.bottom)},
                    {"top", oriented_json(c.top)}});
  }
  bool rational_ratios = true;
  for (std::size_t i = 1; i < dec.cylinders.size(); ++i)
    if (!(dec.modulus(static_cast<int>(i)) / dec.modulus(0)).is_rational()) rational_ratios = false;
  return {{"direction", vec_json(dec.direction.vector)},
          {"spine", spine},
          {"cylinders", cyls},
          {"components", dec.components},
          {"moduli_ratios_rational", rational_ratios}};
}

struct Options {
  // surf
  int genus = 0;
  std::string file, out, bound = "2", sector, direction = "1,0";
  int rotate = 0;
  long budget = 10000;
  bool serial = false;
  // veech / combine
  std::string word;
  int words = 0, max_length = 20;
  std::uint64_t seed = 0;
  int factors = 2;
  std::string powers = "1";
  // amalgam
  std::string spec;
  bool hnn = false;
  // pingpong
  std::string model = "klein", mu = "0,2";
  long k = 2;
  int depth = 4, samples = 200, syllable_length = 2;
};

HalfTranslationSurface load_surface(const Options& o) {
  if (!o.file.empty() && o.genus) throw std::invalid_argument("give either --file or --genus");
  if (!o.file.empty()) return surface_from_json(read_json_file(o.file));
  if (o.genus) return build_double_polygon(o.genus);
  throw std::invalid_argument("a surface is required: --file or --genus");
}

// Direction rotated by rho^rotate when the surface is a double polygon.
Vec2 surface_direction(const HalfTranslationSurface& s, const Options& o) {
  auto r = parse_rationals(o.direction, 2, "--direction");
  Vec2 d{FieldElement(s.field(), r[0]), FieldElement(s.field(), r[1])};
  if (o.rotate) {
    if (!o.genus) throw std::invalid_argument("--rotate needs --genus");
    auto rho = rotation_auto(s, o.genus);
    const int n = 2 * o.genus + 1;
    for (int i = 0; i < ((o.rotate % n) + n) % n; ++i) d = rho.derivative * d;
  }
  return d;
}

CommandResult surf_build(const Options& o) {
  CommandResult r;
  if (!o.genus) throw std::invalid_argument("--genus is required");
  auto s = build_double_polygon(o.genus);
  Json sj = surface_json(s);
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw std::invalid_argument("cannot write " + o.out);
    f << sj.dump(2) << "\n";
    r.payload["written"] = o.out;
  }
  r.payload["surface"] = sj;
  r.payload["summary"] = surface_summary(s);
  return r;
}

CommandResult surf_info(const Options& o) {
  CommandResult r;
  r.payload = surface_summary(load_surface(o));
  return r;
}

CommandResult surf_saddles(const Options& o) {
  CommandResult r;
  auto s = load_surface(o);
  FieldElement bound(s.field(), parse_rational(o.bound));
  std::optional<Sector> sector;
  if (!o.sector.empty()) {
    auto q = parse_rationals(o.sector, 4, "--sector");
    auto e = [&](const Rational& x) { return FieldElement(s.field(), x); };
    sector = Sector{Direction(Vec2{e(q[0]), e(q[1])}), Direction(Vec2{e(q[2]), e(q[3])})};
  }
  auto all = enumerate_saddle_connections(s, bound, sector, !o.serial);
  Json list = Json::array();
  for (const auto& sc : all) list.push_back(saddle_json(sc));
  r.payload = {{"bound", rational_json(parse_rational(o.bound))}, {"count", all.size()}, {"saddle_connections", list}};
  return r;
}

CommandResult surf_cylinders(const Options& o) {
  CommandResult r;
  auto s = load_surface(o);
  Vec2 d = surface_direction(s, o);
  try {
    r.payload = decomposition_json(cylinder_decomposition(s, Direction(d), o.budget));
  } catch (const NotPeriodic& e) {
    throw CommandFailure(exit_code::precondition, e.what(), {{"direction", vec_json(d)}, {"periodic", false}});
  }
  return r;
}

CommandResult veech_gens(const Options& o) {
  CommandResult r;
  auto v = hecke_realization(o.genus);
  const FieldElement one(v.field, Rational(1));
  r.payload = {{"genus", v.g},
               {"field", field_json(v.field)},
               {"lambda", element_json(v.lambda)},
               {"gamma0", matrix_json(v.gamma0)},
               {"gamma1", matrix_json(v.gamma1)},
               {"parabolic", matrix_json(v.parabolic)},
               {"presentation", {{"generators", v.presentation.generators()}, {"orders", {2, v.n()}}}},
               {"relations",
                {{"gamma0_squared_is_minus_identity", v.gamma0 * v.gamma0 == -RealMoebius::identity(one)},
                 {"gamma1_power_is_scalar", v.gamma1.power(v.n()).is_scalar()},
                 {"gamma1_projective_order", projective_order(v.gamma1, 4 * v.n())},
                 {"parabolic_trace", element_json(v.parabolic.trace())}}}};
  return r;
}

CommandResult veech_classify(const Options& o) {
  CommandResult r;
  auto v = hecke_realization(o.genus);
  auto c = classify_element(v, v.parse(o.word));
  r.payload = certificate_json(c);
  r.assumptions = c.assumptions;
  return r;
}

CommandResult veech_kernel(const Options& o) {
  CommandResult r;
  auto v = hecke_realization(o.genus);
  auto k = kernel_presentation(v);
  const auto& kp = k.kernel.presentation;
  Json gens = Json::array();
  for (int i = 0; i < kp.rank(); ++i)
    gens.push_back({{"name", kp.generators()[i]}, {"expansion", v.presentation.format(k.kernel.expansions[i])}});
  auto pm = evaluate_kernel_word(v, k, k.peripheral);
  r.payload = {{"rank", kp.rank()},
               {"index", k.kernel.index},
               {"chi", rational_json(k.chi)},
               {"rank_identity", Rational(kp.rank()) == 1 - k.kernel.index * k.chi},
               {"generators", gens},
               {"peripheral", {{"parent_word", v.presentation.format(k.peripheral_parent)},
                               {"kernel_word", kp.format(k.peripheral)},
                               {"kind", to_string(classify(pm))}}}};
  if (o.words > 0) {
    std::mt19937_64 rng(o.seed);
    std::uniform_int_distribution<int> len(1, o.max_length), gen(0, kp.rank() - 1), coin(0, 1);
    std::vector<Word> words;
    while (static_cast<int>(words.size()) < o.words) {
      Word w;
      int n = len(rng);
      for (int i = 0; i < n; ++i) w.push_back({gen(rng), coin(rng) ? 1L : -1L});
      w = kp.reduce(w);
      if (!w.empty()) words.push_back(w);
    }
    auto hyper = kernel_trace_batch(v, k, words, !o.serial);
    long peripheral = 0, bad = 0;
    Json witness;
    for (std::size_t i = 0; i < words.size(); ++i) {
      auto per = conjugate_into_cyclic(v.presentation, expand_kernel_word(v, k, words[i]), v.parse("s t"));
      bool is_per = per && per->second != 0;
      peripheral += is_per;
      if (is_per == (hyper[i] == 1)) {
        if (!bad) witness = {{"word", kp.format(words[i])}, {"peripheral", is_per}};
        ++bad;
      }
    }
    r.payload["sample"] = {{"words", words.size()}, {"seed", o.seed},       {"max_length", o.max_length},
                           {"peripheral", peripheral}, {"failures", bad}};
    if (bad) throw CommandFailure(exit_code::verification, "trace test failed on a sampled word", witness);
  }
  return r;
}

CommandResult amalgam_chi(const Options& o) {
  CommandResult r;
  Json j = read_json_file(o.spec);
  if (o.hnn) {
    auto base = presentation_from_json(j.at("base")), edge = presentation_from_json(j.at("edge"));
    r.payload = {{"kind", "hnn"}, {"chi", rational_json(hnn_euler_char(base, edge))}};
  } else {
    r.payload = {{"kind", "amalgam"}, {"chi", rational_json(graph_of_groups_euler_char(amalgam_spec_from_json(j)))}};
  }
  return r;
}

CommandResult amalgam_normalform(const Options& o) {
  CommandResult r;
  Amalgam am(amalgam_spec_from_json(read_json_file(o.spec)));
  auto nf = am.normal_form(am.parse(o.word));
  Json syl = Json::array();
  for (const auto& s : nf.syllables)
    syl.push_back({{"factor", s.factor + 1}, {"word", am.spec().factors[s.factor].format(s.word)}});
  r.payload = {{"word", o.word},
               {"normal_form", am.format(nf)},
               {"type", nf.type},
               {"syllables", syl},
               {"residual", nf.residual}};
  return r;
}

CommandResult pingpong_verify(const Options& o) {
  CommandResult r;
  if (o.model != "klein") throw std::invalid_argument("unknown model " + o.model);
  KleinianOptions opt;
  opt.mu = parse_gaussian(o.mu);
  opt.k = o.k;
  opt.depth = o.depth;
  opt.samples = o.samples;
  opt.seed = o.seed;
  opt.syllable_length = o.syllable_length;
  opt.parallel = !o.serial;
  auto rep = kleinian_model(opt);
  Json conds = Json::object();
  for (const auto& c : rep.set_checks) {
    Json e = {{"pass", c.pass}, {"checks", c.checks}, {"evidence", c.evidence}};
    if (!c.pass) e["witness"] = c.witness;
    conds[c.name] = e;
  }
  for (const auto& c : rep.pingpong.conditions) {
    Json e = {{"pass", c.pass}, {"checks", c.checks}, {"evidence", c.evidence}, {"condition", c.condition}};
    if (!c.pass) e["witness"] = c.witness;
    conds[c.name] = e;
  }
  Json replay = {{"pass", rep.pingpong.replay.pass}, {"depth", rep.pingpong.replay.depth},
                 {"words", rep.pingpong.replay.words}};
  if (!rep.pingpong.replay.pass) replay["witness"] = rep.pingpong.replay.witness;
  conds["alternating words act nontrivially"] = replay;
  r.payload = {{"model", o.model},
               {"mu", o.mu},
               {"k", o.k},
               {"min_power", rep.min_power},
               {"precondition_ok", rep.precondition_ok},
               {"arithmetic", rep.arithmetic},
               {"syllables", {rep.syllables_g1, rep.syllables_g2}},
               {"scope", rep.pingpong.scope},
               {"conditions", conds},
               {"pass", rep.pass()}};
  r.assumptions = rep.assumptions;
  if (!rep.pass()) r.exit_code = exit_code::verification;
  return r;
}

std::vector<long> parse_powers(const std::string& text) {
  std::vector<long> out;
  for (const auto& p : split(text, ',')) {
    if (p.empty()) continue;
    try {
      out.push_back(std::stol(p));
    } catch (const std::exception&) {
      throw std::invalid_argument("--powers expects comma-separated integers");
    }
  }
  return out;
}

CommandResult combine_build(const Options& o) {
  CommandResult r;
  auto c = build_combination(o.genus, o.factors, parse_powers(o.powers));
  Json factors = Json::array();
  for (std::size_t i = 0; i < c.spec.factors.size(); ++i)
    factors.push_back({{"generators", c.spec.factors[i].generators()},
                       {"kind", to_string(c.spec.factors[i].kind())},
                       {"edge_image", c.spec.factors[i].format(c.spec.embeddings[i][0])}});
  r.payload = {{"genus", o.genus},
               {"factors", factors},
               {"edge", {{"generators", c.spec.edge.generators()}}},
               {"powers", c.spec.powers},
               {"chi", rational_json(c.chi)},
               {"surface_claim", c.surface_claim}};
  if (c.genus) r.payload["closed_surface_genus"] = *c.genus;
  r.assumptions = c.spec.assumptions;
  return r;
}

CommandResult combine_classify(const Options& o) {
  CommandResult r;
  auto c = build_combination(o.genus, o.factors, parse_powers(o.powers));
  auto cert = classify_in_combination(c, o.word);
  r.payload = certificate_json(cert);
  r.assumptions = cert.assumptions;
  return r;
}

void add_surface_source(CLI::App* cmd, Options& o) {
  cmd->add_option("--genus", o.genus, "double polygon of genus g");
  cmd->add_option("--file", o.file, "surface JSON file");
}

}  // namespace

Json CommandResult::to_json() const {
  return {{"schema_version", schema_version},
          {"command", command},
          {"payload", payload},
          {"assumptions", assumptions},
          {"exit_code", exit_code}};
}

CommandResult run(const std::vector<std::string>& args) {
  CLI::App app{"veechcomb"};
  app.require_subcommand(1);
  Options o;

  auto* surf = app.add_subcommand("surf", "flat surfaces")->require_subcommand(1);
  auto* s_build = surf->add_subcommand("build", "double polygon surface");
  s_build->add_option("--genus", o.genus)->required();
  s_build->add_option("--out", o.out);
  auto* s_info = surf->add_subcommand("info", "invariants");
  add_surface_source(s_info, o);
  auto* s_saddles = surf->add_subcommand("saddles", "saddle connections up to a length");
  add_surface_source(s_saddles, o);
  s_saddles->add_option("--bound", o.bound);
  s_saddles->add_option("--sector", o.sector, "ax,ay,bx,by");
  s_saddles->add_flag("--serial", o.serial);
  auto* s_cyl = surf->add_subcommand("cylinders", "annular decomposition");
  add_surface_source(s_cyl, o);
  s_cyl->add_option("--direction", o.direction, "x,y");
  s_cyl->add_option("--rotate", o.rotate, "apply the rotation this many times");
  s_cyl->add_option("--budget", o.budget);

  auto* veech = app.add_subcommand("veech", "Veech group")->require_subcommand(1);
  auto* v_gens = veech->add_subcommand("gens", "matrix generators");
  auto* v_cls = veech->add_subcommand("classify", "classify an element");
  auto* v_ker = veech->add_subcommand("kernel", "kernel of the derivative map");
  for (auto* c : {v_gens, v_cls, v_ker}) c->add_option("--genus", o.genus)->required();
  v_cls->add_option("--word", o.word)->required();
  v_ker->add_option("--words", o.words, "sample this many random kernel words");
  v_ker->add_option("--max-length", o.max_length);
  v_ker->add_option("--seed", o.seed);
  v_ker->add_flag("--serial", o.serial);

  auto* amalgam = app.add_subcommand("amalgam", "amalgamated products")->require_subcommand(1);
  auto* a_chi = amalgam->add_subcommand("chi", "Euler characteristic");
  a_chi->add_option("--spec", o.spec)->required();
  a_chi->add_flag("--hnn", o.hnn);
  auto* a_nf = amalgam->add_subcommand("normalform", "normal form of a word");
  a_nf->add_option("--spec", o.spec)->required();
  a_nf->add_option("--word", o.word)->required();

  auto* pp = app.add_subcommand("pingpong", "ping-pong verification")->require_subcommand(1);
  auto* p_ver = pp->add_subcommand("verify", "check the Kleinian model");
  p_ver->add_option("--model", o.model);
  p_ver->add_option("--mu", o.mu, "RE,IM");
  p_ver->add_option("--k", o.k);
  p_ver->add_option("--depth", o.depth);
  p_ver->add_option("--samples", o.samples);
  p_ver->add_option("--seed", o.seed);
  p_ver->add_option("--syllable-length", o.syllable_length);
  p_ver->add_flag("--serial", o.serial);

  auto* comb = app.add_subcommand("combine", "combination of Veech groups")->require_subcommand(1);
  auto* c_build = comb->add_subcommand("build", "build the amalgam");
  auto* c_cls = comb->add_subcommand("classify", "classify an element");
  for (auto* c : {c_build, c_cls}) {
    c->add_option("--genus", o.genus)->required();
    c->add_option("--factors", o.factors);
    c->add_option("--powers", o.powers, "k2,...,kP");
  }
  c_cls->add_option("--word", o.word)->required();

  CommandResult result;
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    result.command = "help";
    result.diagnostics = app.help();
    return result;
  } catch (const CLI::ParseError& e) {
    result.command = args.empty() ? "" : args.front();
    result.exit_code = exit_code::usage;
    result.payload = {{"error", e.what()}};
    result.diagnostics = e.what();
    return result;
  }

  std::string name;
  for (auto* top : app.get_subcommands())
    for (auto* sub : top->get_subcommands()) name = top->get_name() + " " + sub->get_name();
  result.command = name;

  try {
    CommandResult r;
    if (*s_build) r = surf_build(o);
    else if (*s_info) r = surf_info(o);
    else if (*s_saddles) r = surf_saddles(o);
    else if (*s_cyl) r = surf_cylinders(o);
    else if (*v_gens) r = veech_gens(o);
    else if (*v_cls) r = veech_classify(o);
    else if (*v_ker) r = veech_kernel(o);
    else if (*a_chi) r = amalgam_chi(o);
    else if (*a_nf) r = amalgam_normalform(o);
    else if (*p_ver) r = pingpong_verify(o);
    else if (*c_build) r = combine_build(o);
    else if (*c_cls) r = combine_classify(o);
    r.command = name;
    return r;
  } catch (const CommandFailure& e) {
    result.exit_code = e.code;
    result.payload = {{"error", e.what()}, {"witness", e.detail}};
    result.diagnostics = e.what();
  } catch (const MalformedWord& e) {
    result.exit_code = exit_code::malformed_word;
    result.payload = {{"error", e.what()}};
    result.diagnostics = e.what();
  } catch (const std::invalid_argument& e) {
    result.exit_code = exit_code::precondition;
    result.payload = {{"error", e.what()}};
    result.diagnostics = e.what();
  } catch (const SurfaceError& e) {
    result.exit_code = exit_code::precondition;
    result.payload = {{"error", e.what()}};
    result.diagnostics = e.what();
  } catch (const WordProblemUnavailable& e) {
    result.exit_code = exit_code::precondition;
    result.payload = {{"error", e.what()}};
    result.diagnostics = e.what();
  } catch (const std::out_of_range& e) {
    result.exit_code = exit_code::precondition;
    result.payload = {{"error", e.what()}};
    result.diagnostics = e.what();
  } catch (const std::exception& e) {
    result.exit_code = exit_code::internal;
    result.payload = {{"error", e.what()}};
    result.diagnostics = std::string("internal error: ") + e.what();
  }
  return result;
}

// ---------------------------------------------------------------------------
// Encodings

Json rational_json(const Rational& q) { return {{"exact", to_string(q)}, {"approx", q.get_d()}}; }

Json element_json(const FieldElement& x) {
  Json coords = Json::array();
  for (const auto& c : x.coords()) coords.push_back(to_string(c));
  return {{"coords", coords}, {"approx", x.approx()}};
}

FieldElement element_from_json(const NumberField& f, const Json& j) {
  if (j.is_number_integer()) return FieldElement(f, Rational(j.get<long>()));
  if (j.is_string()) return FieldElement(f, parse_rational(j.get<std::string>()));
  if (j.is_object() && j.contains("coords")) {
    std::vector<Rational> c;
    for (const auto& x : j.at("coords")) c.push_back(x.is_string() ? parse_rational(x.get<std::string>()) : Rational(x.get<long>()));
    return FieldElement(f, c);
  }
  throw std::invalid_argument("field element must be an integer, a \"p/q\" string or {\"coords\": [...]}");
}

Json field_json(const NumberField& f) {
  Json mp = Json::array();
  for (const auto& c : f.minpoly().coeffs()) mp.push_back(to_string(c));
  return {{"minpoly", mp}, {"interval", {to_string(f.lo()), to_string(f.hi())}}, {"approx", f.approx_generator()}};
}

NumberField field_from_json(const Json& j) {
  if (j.is_null() || (j.is_string() && j.get<std::string>() == "Q")) return NumberField::rationals();
  std::vector<Rational> c;
  for (const auto& x : j.at("minpoly")) c.push_back(parse_rational(x.get<std::string>()));
  const auto& iv = j.at("interval");
  return NumberField(QPoly(c), parse_rational(iv.at(0).get<std::string>()), parse_rational(iv.at(1).get<std::string>()));
}

Json vec_json(const Vec2& v) { return Json::array({element_json(v.x), element_json(v.y)}); }

Json surface_json(const HalfTranslationSurface& s) {
  Json polys = Json::array();
  for (const auto& p : s.polygons()) {
    Json poly = Json::array();
    for (const auto& v : p) poly.push_back(vec_json(v));
    polys.push_back(poly);
  }
  Json gl = Json::array();
  for (const auto& g : s.gluings()) gl.push_back({g.e1, g.e2, g.sign, vec_json(g.w)});
  Json marked = Json::array();
  for (auto [p, v] : s.marked()) marked.push_back({p, v});
  return {{"field", field_json(s.field())}, {"polygons", polys}, {"gluings", gl}, {"marked", marked}};
}

HalfTranslationSurface surface_from_json(const Json& j) {
  try {
    NumberField f = field_from_json(j.contains("field") ? j.at("field") : Json());
    auto vec = [&](const Json& v) { return Vec2{element_from_json(f, v.at(0)), element_from_json(f, v.at(1))}; };
    std::vector<std::vector<Vec2>> polys;
    for (const auto& p : j.at("polygons")) {
      polys.emplace_back();
      for (const auto& v : p) polys.back().push_back(vec(v));
    }
    std::vector<Gluing> gl;
    for (const auto& g : j.at("gluings")) gl.push_back({g.at(0).get<int>(), g.at(1).get<int>(), g.at(2).get<int>(), vec(g.at(3))});
    std::vector<std::pair<int, int>> marked;
    if (j.contains("marked"))
      for (const auto& m : j.at("marked")) marked.emplace_back(m.at(0).get<int>(), m.at(1).get<int>());
    return HalfTranslationSurface(f, polys, gl, marked);
  } catch (const Json::exception& e) {
    throw SurfaceError(std::string("malformed surface JSON: ") + e.what());
  }
}

Json saddle_json(const SaddleConnection& sc) {
  return {{"start", sc.start},
          {"end", sc.end},
          {"start_corner", sc.start_corner},
          {"end_corner", sc.end_corner},
          {"holonomy", vec_json(sc.holonomy)},
          {"length_approx", std::sqrt(norm2(sc.holonomy).approx())},
          {"crossings", sc.crossings}};
}

Presentation presentation_from_json(const Json& j) {
  try {
    if (j.contains("surface")) return Presentation::surface(j.at("surface").get<int>());
    auto gens = j.at("generators").get<std::vector<std::string>>();
    if (!j.contains("orders")) return Presentation::free(gens);
    auto orders = j.at("orders").get<std::vector<long>>();
    if (gens.size() == 1 && orders[0] > 0) return Presentation::cyclic(gens[0], orders[0]);
    return Presentation::free_product_of_cyclics(gens, orders);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed presentation: ") + e.what());
  }
}

AmalgamSpec amalgam_spec_from_json(const Json& j) {
  AmalgamSpec spec;
  try {
    for (const auto& f : j.at("factors")) spec.factors.push_back(presentation_from_json(f));
    spec.edge = presentation_from_json(j.at("edge"));
    const auto& emb = j.at("embeddings");
    if (emb.size() != spec.factors.size()) throw std::invalid_argument("one embedding per factor is required");
    for (std::size_t i = 0; i < emb.size(); ++i) {
      spec.embeddings.emplace_back();
      for (const auto& w : emb[i]) spec.embeddings.back().push_back(spec.factors[i].parse(w.get<std::string>()));
    }
    if (j.contains("powers")) spec.powers = j.at("powers").get<std::vector<long>>();
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed amalgam spec: ") + e.what());
  }
  return spec;
}

}  // namespace veechcomb
