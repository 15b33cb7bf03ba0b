#include "commands.hpp"

#include "common.hpp"

#include "ellip/czd.hpp"
#include "ellip/error.hpp"
#include "ellip/exponents.hpp"
#include "ellip/fields.hpp"
#include "ellip/funcalc.hpp"
#include "ellip/harness.hpp"
#include "ellip/io.hpp"
#include "ellip/offdiag.hpp"
#include "ellip/singular.hpp"
#include "ellip/weights.hpp"

#include <fstream>
#include <memory>
#include <sstream>

namespace ellipctl {

using namespace ellip;

namespace {

json quadrature_json(const TimeQuadrature& tq) {
  json j;
  j["eps"] = num(tq.eps);
  j["T"] = num(tq.T);
  j["nodes"] = tq.t.size();
  j["nodes_per_decade"] = tq.nodes_per_decade;
  return j;
}

template <class V>
json singular_json(const SingularResult<V>& r, const TimeQuadrature& tq) {
  json j = quadrature_json(tq);
  j["tail_estimate"] = num(r.tail_estimate);
  j["flagged"] = r.flagged;
  j["removed_mean"] = {num(r.removed_mean.real()), num(r.removed_mean.imag())};
  return j;
}

void write_dump(const std::string& path, const std::function<void(std::ostream&)>& writer) {
  if (path.empty()) return;
  write_field_file(path, writer);
}

json ball_json(const Ball& b) { return {{"center", {b.center[0], b.center[1]}}, {"radius", b.radius}}; }

}  // namespace

// ---------------------------------------------------------------------------

void add_weights(CLI::App& root) {
  auto* app = root.add_subcommand("weights", "A_p / RH_q constants, index brackets and doubling order of a weight");
  auto args = std::make_shared<OperatorArgs>();
  auto w = std::make_shared<WeightArgs>();
  auto p = std::make_shared<std::string>("2");
  auto centers = std::make_shared<int>(8);
  auto out = std::make_shared<std::string>();
  app->add_option("--n", args->n, "Dimension")->check(CLI::IsMember({1, 2}));
  app->add_option("--N", args->N, "Cells per axis");
  app->add_option("--power-alpha", w->alpha, "Power weight |x|^alpha")->each([w](const std::string&) { w->has_alpha = true; });
  app->add_option("--from-file", w->path, "Weight dump file");
  app->add_option("--p", *p, "A_p exponent (e.g. 2, 3/2)");
  app->add_option("--centers", *centers, "Ball-family resolution: centres per axis");
  app->add_option("-o,--out", *out, "JSON output (stdout by default)");
  app->callback([=] {
    PeriodicGrid g(args->n, args->N);
    WeightField wf = w->load(g);
    ExponentValue pe = ExponentValue::parse(*p);
    BallFamily fam = BallFamily::standard(g, *centers);
    json j = header(0);
    j["grid"] = {{"n", g.dim()}, {"N", g.cells_per_axis()}};
    j["p"] = exponent(pe);
    j["ap_constant"] = num(ap_constant(wf, pe, fam));
    json list = json::array();
    for (const Ball& b : fam.balls) {
      json e = ball_json(b);
      e["constant"] = num(ap_quotient(wf, pe.to_double(), b));
      list.push_back(e);
    }
    j["ap_constants"] = list;
    WeightIndexEstimate idx = weight_indices(wf);
    j["r_w_bracket"] = {exponent(idx.r_w.lo), exponent(idx.r_w.hi), idx.r_w.flagged};
    j["s_w_bracket"] = {exponent(idx.s_w.lo), exponent(idx.s_w.hi), idx.s_w.flagged};
    j["index_source"] = idx.source == IndexSource::analytic ? "analytic" : "estimated";
    j["doubling_order"] = num(doubling_order(wf));
    json verdicts;
    if (g.cells_per_axis() >= 128) {
      MembershipReport ap = ap_verdict(wf, pe.to_double());
      verdicts["ap"] = {{"verdict", to_string(ap.verdict)}, {"increment_ratio", num(ap.increment_ratio)},
                        {"radii", ap.radii}, {"constants", ap.constants}};
    } else {
      verdicts["ap"] = {{"verdict", "skipped"}, {"note", "verdict balls need N >= 128"}};
    }
    j["verdicts"] = verdicts;
    emit(j, *out);
  });
}

void add_build_op(CLI::App& root) {
  auto* app = root.add_subcommand("build-op", "Assemble coefficients and report ellipticity; optionally dump them");
  auto args = std::make_shared<OperatorArgs>();
  auto dump = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  args->add(app);
  app->add_option("--dump", *dump, "Write the coefficient field dump here");
  app->add_option("-o,--out", *out, "JSON output");
  app->callback([=] {
    auto op = args->build();
    const auto& c = op->coeffs();
    json j = header(0);
    j["coeff"] = args->coeff;
    j["grid"] = {{"n", op->grid().dim()}, {"N", op->grid().cells_per_axis()}};
    j["lambda"] = num(c.lambda());
    j["Lambda"] = num(c.Lambda());
    j["theta"] = num(c.theta());
    j["real"] = c.is_real();
    j["hermitian"] = c.is_hermitian();
    j["face_lambda"] = num(op->face_lambda());
    j["face_Lambda"] = num(op->face_Lambda());
    j["lambda_min_bound"] = num(op->lambda_min_bound());
    j["lambda_max_bound"] = num(op->lambda_max_bound());
    write_dump(*dump, [&](std::ostream& os) { write_field(os, c); });
    emit(j, *out);
  });
}

void add_funcalc_check(CLI::App& root) {
  auto* app = root.add_subcommand("funcalc-check", "Contour calculus against the spectral oracle on -Delta");
  auto N = std::make_shared<int>(64);
  auto budgets = std::make_shared<std::string>("10,20,40");
  auto seed = std::make_shared<std::uint64_t>(7);
  auto out = std::make_shared<std::string>();
  app->add_option("--N", *N, "Cells per axis (2-D)");
  app->add_option("--budgets", *budgets, "Contour nodes per decade, comma separated");
  app->add_option("--seed", *seed, "Seed of the random test field");
  app->add_option("-o,--out", *out, "JSON output");
  app->callback([=] {
    auto op = std::make_shared<const EllipticOperator>(EllipticOperator::assemble(CoefficientField::identity(PeriodicGrid(2, *N))));
    SemigroupEvaluator sg(op);
    Field f = random_smooth_field(op->grid(), *seed, *N / 4);
    json rows = json::array();
    for (const HoloSymbol& phi : funcalc_corpus()) {
      Field oracle = sg.apply_function(phi.eval, remove_mean(f));
      for (double b : parse_list(*budgets)) {
        ContourOptions o;
        o.nodes_per_decade = static_cast<int>(b);
        Field got = holo_calc(sg, phi, Contour::for_operator(sg, phi.mu, o), f);
        rows.push_back({{"symbol", phi.name},
                        {"operator", "laplacian " + std::to_string(*N) + "^2"},
                        {"budget", o.nodes_per_decade},
                        {"rel_error", num((got - oracle).norm() / oracle.norm())}});
      }
    }
    json j = header(*seed);
    j["table"] = rows;
    emit(j, *out);
  });
}

std::vector<HoloSymbol> funcalc_corpus() {
  auto dilated = [](const HoloSymbol& phi, double s, const std::string& name) {
    ScalarFn f = phi.eval;
    return HoloSymbol::custom(name, [f, s](cplx z) { return f(s * z); }, phi.decay_s, phi.mu);
  };
  return {HoloSymbol::rational(1, 2), dilated(HoloSymbol::z_exp(), 0.01, "z exp(-z) at z/100"),
          dilated(HoloSymbol::rational(2, 4), 0.01, "z^2/(1+z)^4 at z/100")};
}

// riesz, sqrt, gfun, Gfun share operator, field and weight handling.
void add_singular(CLI::App& root) {
  struct Shared {
    OperatorArgs op;
    FieldArgs field;
    WeightArgs weight;
    double p = 2.0;
    std::string dump;
    std::string out;
  };
  auto make = [&root](const std::string& name, const std::string& help, TimeMeasure measure) {
    auto* app = root.add_subcommand(name, help);
    auto s = std::make_shared<Shared>();
    s->op.add(app);
    s->field.add(app);
    s->weight.add(app);
    app->add_option("--p", s->p, "Exponent of the reported L^p(w) norms");
    app->add_option("--dump", s->dump, "Write the output field dump here");
    app->add_option("-o,--out", s->out, "JSON metadata output");
    app->callback([s, name, measure] {
      auto op = s->op.build();
      SemigroupEvaluator sg(op);
      const PeriodicGrid& g = op->grid();
      Field f = s->field.load(g);
      WeightField w = s->weight.load(g);
      TimeQuadrature tq = TimeQuadrature::for_operator(*op, measure);
      json j = header(s->field.path.empty() ? s->field.seed : 0);
      j["operation"] = name;
      VecField value;
      if (name == "riesz") {
        auto r = riesz_apply(sg, f, tq);
        j.update(singular_json(r, tq));
        value = r.value;
      } else if (name == "sqrt") {
        auto r = sqrt_apply(sg, f, tq);
        j.update(singular_json(r, tq));
        value = r.value;
      } else if (name == "gfun") {
        auto r = g_function(sg, f, tq);
        j.update(singular_json(r, tq));
        value = r.value.cast<cplx>();
      } else {
        auto r = big_g_function(sg, f, tq);
        j.update(singular_json(r, tq));
        value = r.value.cast<cplx>();
      }
      j["p"] = s->p;
      j["input_norm"] = num(weighted_lp_norm(g, f, w, s->p));
      j["output_norm"] = num(weighted_lp_norm(g, value, w, s->p));
      write_dump(s->dump, [&](std::ostream& os) {
        if (value.cols() == 1)
          write_field(os, g, Field(value.col(0)));
        else
          write_field(os, g, value);
      });
      emit(j, s->out);
    });
  };
  make("riesz", "grad L^{-1/2} f", TimeMeasure::inv_sqrt);
  make("sqrt", "L^{1/2} f", TimeMeasure::inv_sqrt);
  make("gfun", "vertical square function g_L f", TimeMeasure::inv_t);
  make("Gfun", "gradient square function G_L f", TimeMeasure::plain);
}

void add_commutator(CLI::App& root) {
  auto* app = root.add_subcommand("commutator", "k-th order commutator T_b^k f with T = riesz or sqrt");
  auto op = std::make_shared<OperatorArgs>();
  auto f = std::make_shared<FieldArgs>();
  auto b = std::make_shared<FieldArgs>();
  b->name = "b";
  b->seed = 2;
  auto k = std::make_shared<int>(1);
  auto transform = std::make_shared<std::string>("riesz");
  auto dump = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  op->add(app);
  f->add(app);
  b->add(app, "--b");
  app->add_option("--k", *k, "Order")->check(CLI::NonNegativeNumber);
  app->add_option("--transform", *transform, "riesz | sqrt")->check(CLI::IsMember({"riesz", "sqrt"}));
  app->add_option("--dump", *dump, "Write T_b^k f here");
  app->add_option("-o,--out", *out, "JSON metadata output");
  app->callback([=] {
    auto L = op->build();
    SemigroupEvaluator sg(L);
    const PeriodicGrid& g = L->grid();
    Field ff = f->load(g);
    Field bb = b->load(g).real().cast<cplx>();
    TimeQuadrature tq = TimeQuadrature::for_operator(*L, TimeMeasure::inv_sqrt);
    LinearMap T = *transform == "riesz" ? LinearMap::riesz(sg, tq) : LinearMap::sqrt(sg, tq);
    VecField v = commutator(T, bb, *k, ff);
    VecField vr = commutator_recursive(T, bb, *k, ff);
    json j = header(f->seed);
    j.update(quadrature_json(tq));
    j["transform"] = *transform;
    j["k"] = *k;
    j["binomial_vs_recursive"] = num((v - vr).norm() / std::max(v.norm(), 1e-300));
    write_dump(*dump, [&](std::ostream& os) {
      if (v.cols() == 1)
        write_field(os, g, Field(v.col(0)));
      else
        write_field(os, g, v);
    });
    emit(j, *out);
  });
}

void add_offdiag(CLI::App& root) {
  auto* app = root.add_subcommand("offdiag", "Fit L^p-L^q off-diagonal estimates of an operator family");
  auto op = std::make_shared<OperatorArgs>();
  op->n = 1;
  op->N = 256;
  auto family = std::make_shared<std::string>("heat");
  auto symbol = std::make_shared<std::string>("1,2");
  auto p = std::make_shared<double>(2.0);
  auto q = std::make_shared<double>(2.0);
  auto times = std::make_shared<std::string>("2e-4,5e-4,1e-3,2e-3");
  auto offsets = std::make_shared<std::string>("-0.4,-0.375,-0.35,-0.325,-0.3");
  auto width = std::make_shared<double>(0.05);
  auto probes = std::make_shared<int>(32);
  auto seed = std::make_shared<std::uint64_t>(1);
  auto out = std::make_shared<std::string>();
  op->add(app);
  app->add_option("--family", *family, "heat | grad-heat | custom")->check(CLI::IsMember({"heat", "grad-heat", "custom"}));
  app->add_option("--symbol", *symbol, "custom family phi(tL), phi = z^a/(1+z)^b given as a,b");
  app->add_option("--p", *p, "Input exponent");
  app->add_option("--q", *q, "Output exponent");
  app->add_option("--times", *times, "Times, comma separated");
  app->add_option("--offsets", *offsets, "Left ends of F along axis 0 (E = [-1/2, -1/2 + width))");
  app->add_option("--width", *width, "Slab width");
  app->add_option("--probes", *probes, "Probe fields per set");
  app->add_option("--seed", *seed, "Probe seed");
  app->add_option("-o,--out", *out, "JSON report");
  app->callback([=] {
    auto L = op->build();
    SemigroupEvaluator sg(L);
    const PeriodicGrid& g = L->grid();
    OperatorFamily T;
    if (*family == "heat") {
      T = OperatorFamily::heat(sg);
    } else if (*family == "grad-heat") {
      T = OperatorFamily::grad_heat(sg);
    } else {
      auto ab = parse_list(*symbol);
      if (ab.size() != 2) throw ParseError("--symbol expects a,b");
      HoloSymbol base = HoloSymbol::rational(static_cast<int>(ab[0]), static_cast<int>(ab[1]));
      T.name = "custom " + base.name;
      // phi(tL) = sum_j c_j e^{-z_j t L} on a contour fitted to the spectrum of tL.
      T.apply = [&sg, base](double t, const Field& f) {
        const EllipticOperator& Lop = sg.op();
        auto ctr = Contour::make(Lop.theta(), base.mu, t * Lop.lambda_min_bound(), t * Lop.lambda_max_bound());
        EtaTable table = tabulate(base, ctr);
        for (auto& z : table.z) z *= t;
        return VecField(holo_calc(sg, table, f));
      };
    }
    std::vector<SetPair> sets;
    for (double a : parse_list(*offsets)) sets.push_back(SetPair::slabs(g, -0.5, -0.5 + *width, a, a + *width));
    OffDiagOptions opt;
    opt.probes.count = *probes;
    opt.probes.seed = *seed;
    OffDiagReport r = verify_full_offdiag(g, T, *p, *q, sets, parse_list(*times), opt);
    json j = header(*seed);
    j["family"] = T.name.empty() ? *family : T.name;
    j["p"] = num(*p);
    j["q"] = num(*q);
    j["passed"] = r.passed;
    j["c"] = num(r.c);
    j["constant"] = num(r.constant);
    j["residual"] = num(r.residual);
    j["slope"] = num(r.slope);
    j["r_squared"] = num(r.r_squared);
    j["regression_points"] = r.regression_points;
    j["note"] = r.note;
    json samples = json::array();
    for (const auto& s : r.samples)
      samples.push_back({{"kind", s.kind}, {"t", num(s.t)}, {"distance", num(s.distance)}, {"lhs", num(s.lhs)},
                         {"rhs_model", num(s.rhs_model)}});
    j["samples"] = samples;
    emit(j, *out);
  });
}

void add_czd(CLI::App& root) {
  auto* app = root.add_subcommand("czd", "Calderon-Zygmund decomposition at a gradient height");
  auto args = std::make_shared<OperatorArgs>();
  args->N = 128;
  auto field = std::make_shared<FieldArgs>();
  auto weight = std::make_shared<WeightArgs>();
  auto p = std::make_shared<std::string>("2");
  auto q = std::make_shared<std::string>();
  auto alpha = std::make_shared<double>(1.0);
  auto height = std::make_shared<double>(0.0);
  auto prefix = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  app->add_option("--n", args->n, "Dimension")->check(CLI::IsMember({1, 2}));
  app->add_option("--N", args->N, "Cells per axis");
  field->add(app);
  weight->add(app);
  app->add_option("--p", *p, "Exponent p");
  app->add_option("--q", *q, "Oscillation exponent (defaults to p)");
  auto* abs_opt = app->add_option("--alpha", *alpha, "Height");
  app->add_option("--height", *height, "Height as a multiple of the L^p(w) mean of |grad f|")->excludes(abs_opt);
  app->add_option("--dump-prefix", *prefix, "Write <prefix>g.field and <prefix>b.field (sum of the bad parts)");
  app->add_option("-o,--out", *out, "JSON property report");
  app->callback([=] {
    PeriodicGrid g(args->n, args->N);
    Field f = field->load(g);
    WeightField w = weight->load(g);
    ExponentValue pe = ExponentValue::parse(*p);
    if (*height > 0.0) {
      const double pd = pe.to_double();
      RealField m = forward_gradient(g, f).cwiseAbs2().rowwise().sum().cwiseSqrt();
      *alpha = *height * std::pow(m.array().pow(pd).matrix().dot(w.values()) / w.values().sum(), 1.0 / pd);
    }
    CZDecomposition dec = cz_decompose(f, w, pe, *alpha);
    PropertyReport rep = verify_cz(dec, q->empty() ? pe : ExponentValue::parse(*q));
    json j = header(field->path.empty() ? field->seed : 0);
    j["alpha"] = num(*alpha);
    j["p"] = exponent(pe);
    j["weight_in_ap"] = dec.weight_in_ap;
    j["max_level"] = dec.max_level;
    j["properties"] = {{"reconstruction", num(rep.reconstruction)},
                       {"grad_g", num(rep.grad_g)},
                       {"energy", num(rep.energy)},
                       {"measure", num(rep.measure)},
                       {"overlap", rep.overlap},
                       {"overlap_limit", rep.overlap_limit},
                       {"oscillation", num(rep.oscillation)},
                       {"support_excess", num(rep.support_excess)},
                       {"q", exponent(rep.q)},
                       {"pw_star", exponent(rep.pw_star)},
                       {"q_in_range", rep.q_in_range}};
    j["note"] = dec.note.empty() || rep.note.empty() ? dec.note + rep.note : dec.note + "; " + rep.note;
    json parts = json::array();
    for (const auto& part : dec.parts)
      parts.push_back({{"level", part.cube.level},
                       {"corner", {part.cube.i0, part.cube.i1}},
                       {"ball", ball_json(part.ball)},
                       {"cells", part.cells.size()},
                       {"average", {num(part.average.real()), num(part.average.imag())}}});
    j["parts"] = parts;
    if (!prefix->empty()) {
      Field b = Field::Zero(g.size());
      for (const auto& part : dec.parts) b += part.dense(g.size());
      write_field_file(*prefix + "g.field", [&](std::ostream& os) { write_field(os, g, dec.g); });
      write_field_file(*prefix + "b.field", [&](std::ostream& os) { write_field(os, g, b); });
    }
    emit(j, *out);
  });
}

// ---------------------------------------------------------------------------
// Harness

json sweep_json(const SweepResult& r) {
  json j = header(r.config.budget.seed);
  j["config_hash"] = hex(r.config_hash);
  j["config"] = r.config.canonical();
  j["thresholds"] = {{"growth", kGrowthThreshold}, {"stable", kStableThreshold}};
  j["q_plus"] = exponent(r.config.exponents().q_plus);
  json pts = json::array();
  for (const auto& pt : r.points) {
    json v = json::array(), ra = json::array();
    for (double x : pt.values) v.push_back(num(x));
    for (double x : pt.ratios) ra.push_back(num(x));
    pts.push_back({{"p", pt.p},
                   {"alpha", pt.alpha},
                   {"values", v},
                   {"ratios", ra},
                   {"verdict", to_string(pt.verdict)},
                   {"certified", pt.certified}});
  }
  j["points"] = pts;
  json cells = json::array();
  for (const auto& c : r.cells)
    cells.push_back({{"p", c.p},
                     {"alpha", c.alpha},
                     {"N", c.N},
                     {"value", num(c.estimate.value)},
                     {"probe_value", num(c.estimate.probe_value)},
                     {"method", c.estimate.method},
                     {"iterations", c.estimate.iterations},
                     {"converged", c.estimate.converged},
                     {"error", c.error}});
  j["cells"] = cells;
  j["inconsistencies"] = r.inconsistencies().size();
  return j;
}

void add_sweep(CLI::App& root) {
  auto* app = root.add_subcommand("sweep", "Riesz norm estimates over (p, alpha, N) with power weights");
  auto config = std::make_shared<std::string>();
  auto threads = std::make_shared<int>(0);
  auto csv = std::make_shared<std::string>();
  auto svg = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  app->add_option("config", *config, "Config file (key = value)")->required();
  app->add_option("--threads", *threads, "Override the worker count");
  app->add_option("--csv", *csv, "Write the cell table here");
  app->add_option("--svg", *svg, "Write the (p, alpha) plot here");
  app->add_option("-o,--out", *out, "JSON report");
  app->callback([=] {
    SweepConfig c = SweepConfig::load(*config);
    if (*threads > 0) c.threads = *threads;
    SweepResult r = sweep(c);
    if (!csv->empty()) {
      std::ostringstream os;
      write_sweep_csv(os, r);
      write_text(*csv, os.str());
    }
    if (!svg->empty()) {
      std::ostringstream os;
      write_sweep_svg(os, r, c.n);
      write_text(*svg, os.str());
    }
    emit(sweep_json(r), *out);
  });
}

void add_witness(CLI::App& root) {
  auto* app = root.add_subcommand("witness", "Meyers-Kenig witness: ||grad v||_p against ||L^{1/2} v||_p");
  auto q = std::make_shared<double>(4.0);
  auto ps = std::make_shared<std::string>("2,6");
  auto Ns = std::make_shared<std::string>("32,64,128");
  auto out = std::make_shared<std::string>();
  app->add_option("--q", *q, "Meyers-Kenig exponent (> 2)");
  app->add_option("--p", *ps, "Exponents, comma separated");
  app->add_option("--N", *Ns, "Resolutions, comma separated");
  app->add_option("-o,--out", *out, "JSON report");
  app->callback([=] {
    std::vector<int> N;
    for (double x : parse_list(*Ns)) N.push_back(static_cast<int>(x));
    WitnessReport rep = witness_check(*q, parse_list(*ps), N);
    json j = header(0);
    j["q"] = rep.q;
    j["beta"] = rep.beta;
    j["correction_residual"] = num(rep.correction_residual);
    json rows = json::array();
    for (const auto& r : rep.rows)
      rows.push_back({{"N", r.N}, {"p", r.p}, {"grad_norm", num(r.grad_norm)}, {"sqrt_norm", num(r.sqrt_norm)}});
    j["rows"] = rows;
    json per_p = json::array();
    for (const auto& [p, gr] : rep.grad_ratios)
      per_p.push_back({{"p", p},
                       {"grad_ratios", gr},
                       {"sqrt_ratios", rep.sqrt_ratios.at(p)},
                       {"limit_ratio", rep.oracle_ratio.at(p)},
                       {"grad_growing", rep.grad_growing.at(p)},
                       {"sqrt_stable", rep.sqrt_stable.at(p)}});
    j["summary"] = per_p;
    j["note"] = rep.note;
    emit(j, *out);
  });
}

void add_report(CLI::App& root) {
  auto* app = root.add_subcommand("report", "Render a sweep CSV as a verdict table and an SVG plot");
  auto input = std::make_shared<std::string>();
  auto svg = std::make_shared<std::string>("sweep.svg");
  auto table = std::make_shared<std::string>();
  auto q_plus = std::make_shared<std::string>("inf");
  auto n = std::make_shared<int>(2);
  app->add_option("csv", *input, "CSV written by `sweep --csv`")->required();
  app->add_option("--svg", *svg, "Plot output");
  app->add_option("--table", *table, "Table output (stdout by default)");
  app->add_option("--q-plus", *q_plus, "q_+ for the certified-range overlay");
  app->add_option("--n", *n, "Dimension for the overlay")->check(CLI::IsMember({1, 2}));
  app->callback([=] {
    std::ifstream in(*input);
    if (!in) throw Error("cannot open " + *input);
    SweepResult r = read_sweep_csv(in);
    CriticalExponents ce;
    ce.q_plus = ExponentValue::parse(*q_plus);
    r.config.ce = ce;
    r.config.n = *n;
    classify(r);
    std::ostringstream os;
    write_sweep_csv(os, r);
    write_text(*table, os.str());
    std::ostringstream sv;
    write_sweep_svg(sv, r, *n);
    write_text(*svg, sv.str());
  });
}

void register_commands(CLI::App& app) {
  add_weights(app);
  add_build_op(app);
  add_funcalc_check(app);
  add_singular(app);
  add_commutator(app);
  add_offdiag(app);
  add_czd(app);
  add_sweep(app);
  add_witness(app);
  add_report(app);
}

}  // namespace ellipctl
