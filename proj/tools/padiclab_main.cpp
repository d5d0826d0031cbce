#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "padiclab/amice.hpp"
#include "padiclab/coleman.hpp"
#include "padiclab/epsilon.hpp"
#include "padiclab/parallel.hpp"
#include "padiclab/yager.hpp"

using json = nlohmann::ordered_json;
using namespace padiclab;

namespace {

// Run-wide knobs, echoed verbatim into every payload so an output file
// identifies the run that produced it.
struct RunConfig {
    std::uint64_t p = 5;
    int digits = 12;
    int guard = 2;
    int pi_terms = 64;
    int level = 2;
    std::uint64_t seed = 1;
    std::string json_out;
};

json config_json(const RunConfig& cfg) {
    return json{{"p", cfg.p},           {"digits", cfg.digits},
                {"guard", cfg.guard},   {"pi_terms", cfg.pi_terms},
                {"level", cfg.level},   {"seed", cfg.seed},
                {"json_out", cfg.json_out}};
}

// Every numeric claim travels with the digit count that backs it.
json scalar_json(const PadicScalar& s) {
    return json{{"digits", s.to_string()}, {"certified_digits", s.abs_prec()}};
}

json cyc_json(const CyclotomicElem<PadicScalar>& x) {
    json coords = json::array();
    int cert = std::numeric_limits<int>::max();
    for (const auto& c : x.coords()) {
        coords.push_back(c.to_string());
        cert = std::min(cert, c.abs_prec());
    }
    return json{
        {"level", x.level()}, {"certified_digits", cert}, {"coords", coords}};
}

json series_json(const PiSeries<PadicScalar>& f) {
    json coeffs = json::array();
    int cert = std::numeric_limits<int>::max();
    for (int k = 0; k < f.nterms(); ++k) {
        coeffs.push_back(f.coeff(k).to_string());
        cert = std::min(cert, f.coeff(k).abs_prec());
    }
    return json{
        {"terms", f.nterms()}, {"certified_digits", cert}, {"coeffs", coeffs}};
}

std::string rat_str(const BigRational& r) {
    std::ostringstream out;
    out << r;
    return out.str();
}

BigRational parse_rational(const std::string& text) {
    try {
        auto slash = text.find('/');
        if (slash == std::string::npos)
            return BigRational(BigInt(text));
        BigInt den(text.substr(slash + 1));
        if (den == 0)
            throw std::invalid_argument("zero denominator");
        return BigRational(BigInt(text.substr(0, slash))) / BigRational(den);
    } catch (const std::runtime_error&) {
        throw std::invalid_argument("not a rational: '" + text + "'");
    }
}

int emit(const RunConfig& cfg, const json& payload, bool ok) {
    std::string text = payload.dump(2);
    text += '\n';
    std::cout << text;
    if (!cfg.json_out.empty()) {
        std::ofstream out(cfg.json_out, std::ios::binary);
        if (!out)
            throw std::invalid_argument("cannot open output path " + cfg.json_out);
        out << text;
    }
    return ok ? 0 : 1;
}

GroupAlgebraMeasure<PadicScalar> build_measure(const RunConfig& cfg,
                                               const std::string& kind,
                                               std::uint64_t gelt, int prec) {
    using Meas = GroupAlgebraMeasure<PadicScalar>;
    if (kind == "dirac")
        return Meas::dirac(cfg.p, cfg.level, gelt, PadicScalar::one(cfg.p, prec));
    Meas mu(cfg.p, cfg.level, PadicScalar::zero(cfg.p, prec));
    if (kind == "uniform") {
        for (std::uint64_t a = 0; a < mu.modulus(); ++a)
            if (a % cfg.p != 0)
                mu.set(a, PadicScalar::one(cfg.p, prec));
        return mu;
    }
    if (kind == "seeded") {
        std::minstd_rand rng(static_cast<std::uint32_t>(cfg.seed));
        std::uint64_t pm = detail::upow_checked(cfg.p, prec);
        for (std::uint64_t a = 0; a < mu.modulus(); ++a)
            if (a % cfg.p != 0)
                mu.set(a, PadicScalar::from_residue(cfg.p, prec, rng() % pm));
        return mu;
    }
    throw std::invalid_argument("unknown measure kind '" + kind +
                                "', expected dirac, uniform or seeded");
}

// -------------------------------------------------------------------- kl --

int run_kubota_leopoldt(const RunConfig& cfg, long long a, int k) {
    MomentCertificate cert =
        kubota_leopoldt(cfg.p, a, k, cfg.digits, cfg.pi_terms);
    int required = cfg.digits - cfg.guard;
    bool ok = cert.agree_digits >= required;
    json out{{"command", "kubota-leopoldt"},
             {"config", config_json(cfg)},
             {"a", a},
             {"k", k},
             {"value", scalar_json(cert.value)},
             {"oracle_value", scalar_json(cert.oracle)},
             {"agree_digits", cert.agree_digits},
             {"required_digits", required},
             {"oracle_agrees", ok}};
    return emit(cfg, out, ok);
}

// ----------------------------------------------------------- coleman-check --

int run_coleman_check(const RunConfig& cfg, long long a, int levels) {
    if (levels < 1)
        throw std::invalid_argument("level count must be >= 1");
    int prec = PrecisionProfile(cfg.p, cfg.digits, cfg.guard).working();
    std::uint64_t need =
        (cfg.p - 1) * detail::upow_checked(cfg.p, levels - 1);
    int terms =
        std::max({cfg.pi_terms, static_cast<int>(need), 48});
    PiSeries<PadicScalar> g = cyclotomic_unit_series(cfg.p, a, terms, prec);

    // interpolation residuals at each torsion level, independent slots
    std::vector<int> defect(static_cast<std::size_t>(levels), 0);
    parallel_for(static_cast<std::size_t>(levels), [&](std::size_t i) {
        defect[i] = interpolation_check(g, a, static_cast<int>(i) + 1);
    });
    json interp = json::array();
    bool all_exact = true;
    for (int n = 1; n <= levels; ++n) {
        int d = defect[static_cast<std::size_t>(n - 1)];
        bool exact = d == std::numeric_limits<int>::max();
        all_exact = all_exact && exact;
        interp.push_back(json{{"level", n},
                              {"defect_valuation", exact ? json("exact") : json(d)}});
    }

    // fixed point of the norm operator, ten digits over forty terms
    PiSeries<PadicScalar> n = coleman_norm(g, cfg.digits);
    int check_terms = std::min(40, n.nterms());
    int norm_digits = std::min(10, cfg.digits - cfg.guard);
    bool fixed = true;
    int worst = std::numeric_limits<int>::max();
    for (int m = 0; m < check_terms; ++m) {
        int ad = PadicScalar::agree_digits(n.coeff(m), g.coeff(m));
        worst = std::min(worst, ad);
        fixed = fixed && ad >= norm_digits;
    }
    bool ok = all_exact && fixed;
    json out{{"command", "coleman-check"},
             {"config", config_json(cfg)},
             {"a", a},
             {"interpolation", interp},
             {"norm_fixed", fixed},
             {"norm_checked_terms", check_terms},
             {"norm_checked_digits", norm_digits},
             {"norm_agree_digits", worst},
             {"all_exact", all_exact}};
    return emit(cfg, out, ok);
}

// ------------------------------------------------------------------ mellin --

int run_mellin(const RunConfig& cfg, const std::string& kind,
               std::uint64_t gelt) {
    int prec = PrecisionProfile(cfg.p, cfg.digits, cfg.guard).working();
    GroupAlgebraMeasure<PadicScalar> mu = build_measure(cfg, kind, gelt, prec);
    PiSeries<PadicScalar> f = mellin(mu, cfg.pi_terms);
    int audit_digits = std::min(6, cfg.digits - cfg.guard);
    bool vanishes = psi_vanishes(f, audit_digits);
    json out{{"command", "mellin"},
             {"config", config_json(cfg)},
             {"measure", kind},
             {"group_element", gelt},
             {"series", series_json(f)},
             {"psi_vanishes", vanishes},
             {"psi_checked_digits", audit_digits}};
    return emit(cfg, out, vanishes);
}

// ---------------------------------------------------------- eval-character --

int run_eval_character(const RunConfig& cfg, int tame, int wild_level,
                       std::uint64_t wild, int weight, const std::string& kind,
                       std::uint64_t gelt) {
    int prec = PrecisionProfile(cfg.p, cfg.digits, cfg.guard).working();
    CharacterSpec eta{cfg.p, tame, wild_level, wild, weight};
    GroupAlgebraMeasure<PadicScalar> mu = build_measure(cfg, kind, gelt, prec);

    CyclotomicElem<PadicScalar> group = eval_character(mu, eta);
    int terms = std::max<int>(
        cfg.pi_terms,
        static_cast<int>(detail::upow_checked(cfg.p, mu.level())) +
            std::max(0, weight) + 1);
    CyclotomicElem<PadicScalar> series = eval_character_series(mu, eta, terms);

    int c = eta.conductor_level();
    bool agree;
    if (c == 0) {
        agree = series.same_value(group);
    } else {
        CharacterSpec om{cfg.p, tame, wild_level, wild, 0};
        CyclotomicElem<PadicScalar> tau = eval_character_series(
            GroupAlgebraMeasure<PadicScalar>::dirac(cfg.p, cfg.level, 1,
                                                    PadicScalar::one(cfg.p, prec)),
            om, 4);
        agree = series.same_value(tau * raise_level(group, c));
    }
    json out{{"command", "eval-character"},
             {"config", config_json(cfg)},
             {"character",
              json{{"tame", tame},
                   {"wild_level", wild_level},
                   {"wild", wild},
                   {"weight", weight},
                   {"conductor_level", c}}},
             {"measure", kind},
             {"group_route", cyc_json(group)},
             {"series_route", cyc_json(series)},
             {"routes_agree", agree}};
    return emit(cfg, out, agree);
}

// --------------------------------------------------------------- gauss-sum --

int run_gauss_sum(const RunConfig& cfg, int tame, int wild_level,
                  std::uint64_t wild, long long gamma) {
    int prec = PrecisionProfile(cfg.p, cfg.digits, cfg.guard).working();
    WeilCharacter w{CharacterSpec{cfg.p, tame, wild_level, wild, 0}, 0,
                    PadicScalar::one(cfg.p, prec)};
    int n = w.conductor();
    CyclotomicElem<PadicScalar> tau = gauss_sum(w, gamma);
    CyclotomicElem<PadicScalar> taubar = gauss_sum(w.inverse(), gamma);
    CyclotomicElem<PadicScalar> prod = tau * taubar;
    int sign = w.finite.tame_norm() % 2 == 0 ? 1 : -1;
    PadicScalar expect =
        PadicScalar::one(cfg.p, prec).mul_int(sign).mul_p_pow(n);
    bool pair_ok = prod.same_value(
        CyclotomicElem<PadicScalar>::scalar(cfg.p, n, expect));
    json out{{"command", "gauss-sum"},
             {"config", config_json(cfg)},
             {"character",
              json{{"tame", tame}, {"wild_level", wild_level}, {"wild", wild}}},
             {"gamma", gamma},
             {"conductor_level", n},
             {"sign", sign},
             {"tau", cyc_json(tau)},
             {"tau_inverse_character", cyc_json(taubar)},
             {"tau_squared", cyc_json(tau * tau)},
             {"pair_product_is_sign_times_conductor_power", pair_ok}};
    return emit(cfg, out, pair_ok);
}

// ----------------------------------------------------------------- epsilon --

int run_epsilon(const RunConfig& cfg, int tame, int wild_level,
                std::uint64_t wild, int weight, std::uint64_t frob_teich) {
    int prec = PrecisionProfile(cfg.p, cfg.digits, cfg.guard).working();
    PadicScalar frob =
        PadicScalar::from_residue(cfg.p, prec, frob_teich % cfg.p).teichmuller();
    WeilCharacter w{CharacterSpec{cfg.p, tame, wild_level, wild, 0}, weight,
                    frob};
    EpsilonReport routes = epsilon_routes(w);
    bool agree = routes.closed.same_value(routes.direct);
    LFactor lf = l_factor(w);
    json lfj{{"is_one", lf.is_one}};
    if (!lf.is_one)
        lfj["u"] = scalar_json(lf.u);
    json out{{"command", "epsilon"},
             {"config", config_json(cfg)},
             {"character",
              json{{"tame", tame},
                   {"wild_level", wild_level},
                   {"wild", wild},
                   {"weight", weight},
                   {"frob", scalar_json(frob)}}},
             {"conductor_level", w.conductor()},
             {"epsilon_closed", cyc_json(routes.closed)},
             {"epsilon_direct", cyc_json(routes.direct)},
             {"routes_agree", agree},
             {"l_factor", lfj}};
    return emit(cfg, out, agree);
}

// ------------------------------------------------------------------- yager --

json elem_coords_json(const UnramifiedElem& x) {
    json coords = json::array();
    for (const auto& c : x.coords())
        coords.push_back(c.to_string());
    return coords;
}

int run_yager(const RunConfig& cfg, int steps) {
    if (steps < 1)
        throw std::invalid_argument("tower needs at least one level");
    int prec = PrecisionProfile(cfg.p, cfg.digits, cfg.guard).working();
    std::vector<UnramifiedField::Ptr> fields;
    for (int i = 0; i < steps; ++i)
        fields.push_back(UnramifiedField::make(
            cfg.p, prec, static_cast<int>(detail::upow_checked(cfg.p, i))));

    // seeded top-level measure, traced down so the tower is compat-exact
    std::minstd_rand rng(static_cast<std::uint32_t>(cfg.seed));
    std::uint64_t pm = detail::upow_checked(cfg.p, prec);
    std::vector<UnramifiedMeasure> levels;
    levels.reserve(static_cast<std::size_t>(steps));
    {
        const auto& K = fields.back();
        UnramifiedMeasure top(cfg.p, cfg.level, K->zero());
        for (std::uint64_t a = 0; a < top.modulus(); ++a) {
            if (a % cfg.p == 0)
                continue;
            std::vector<PadicScalar> coords;
            for (int d = 0; d < K->degree(); ++d)
                coords.push_back(PadicScalar::from_residue(cfg.p, prec, rng() % pm));
            top.set(a, UnramifiedElem(K, std::move(coords)));
        }
        levels.resize(static_cast<std::size_t>(steps), top);
    }
    for (int i = steps - 2; i >= 0; --i) {
        UnramifiedEmbedding emb(fields[static_cast<std::size_t>(i)],
                                fields[static_cast<std::size_t>(i + 1)]);
        UnramifiedMeasure down(cfg.p, cfg.level,
                               fields[static_cast<std::size_t>(i)]->zero());
        const UnramifiedMeasure& up = levels[static_cast<std::size_t>(i + 1)];
        for (std::uint64_t a = 0; a < up.modulus(); ++a)
            if (a % cfg.p != 0)
                down.set(a, emb.trace(up.at(a)));
        levels[static_cast<std::size_t>(i)] = down;
    }

    TwoVarMeasureTower tower = assemble_two_var(levels);
    json lv = json::array();
    json semilinear = json::array();
    bool ok = true;
    for (int i = 0; i < steps; ++i) {
        bool s = two_var_semilinear(tower.levels[static_cast<std::size_t>(i)]);
        ok = ok && s;
        semilinear.push_back(s);
        json entries = json::array();
        const UnramifiedMeasure& h = levels[static_cast<std::size_t>(i)];
        for (std::uint64_t a = 0; a < h.modulus(); ++a)
            if (a % cfg.p != 0 && !h.at(a).is_zero())
                entries.push_back(json::array({a, elem_coords_json(h.at(a))}));
        lv.push_back(json{
            {"degree", fields[static_cast<std::size_t>(i)]->degree()},
            {"defining_poly", fields[static_cast<std::size_t>(i)]->defining_poly()},
            {"measure", entries}});
    }
    json out{{"command", "yager"},
             {"config", config_json(cfg)},
             {"tower",
              json{{"p", cfg.p}, {"cyclotomic_level", cfg.level}, {"levels", lv}}},
             {"semilinear", semilinear}};
    return emit(cfg, out, ok);
}

// ------------------------------------------------------------ tower-compat --

int run_tower_compat(const RunConfig& cfg, const std::string& path) {
    json doc;
    if (path == "-") {
        std::cin >> doc;
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::invalid_argument("cannot open tower file " + path);
        in >> doc;
    }
    const json& tower = doc.contains("tower") ? doc["tower"] : doc;
    std::uint64_t p = tower.at("p").get<std::uint64_t>();
    int clevel = tower.at("cyclotomic_level").get<int>();
    std::vector<UnramifiedMeasure> levels;
    for (const json& lj : tower.at("levels")) {
        std::vector<std::uint64_t> poly =
            lj.at("defining_poly").get<std::vector<std::uint64_t>>();
        int prec = PrecisionProfile(p, cfg.digits, cfg.guard).working();
        UnramifiedField::Ptr K = UnramifiedField::make_with_poly(p, prec, poly);
        UnramifiedMeasure h(p, clevel, K->zero());
        for (const json& entry : lj.at("measure")) {
            std::uint64_t a = entry.at(0).get<std::uint64_t>();
            std::vector<PadicScalar> coords;
            for (const json& cs : entry.at(1))
                coords.push_back(PadicScalar::parse(p, cs.get<std::string>()));
            if (static_cast<int>(coords.size()) != K->degree())
                throw std::invalid_argument(
                    "measure entry does not match the field degree");
            h.set(a, UnramifiedElem(K, std::move(coords)));
        }
        levels.push_back(std::move(h));
    }
    TowerCompatReport rep = check_tower_compat(assemble_two_var(levels));
    json pairs = json::array();
    for (const auto& pr : rep.pairs)
        pairs.push_back(
            json{{"lower_level", pr.lower_level},
                 {"defect_valuation", pr.defect_valuation == kExactCongruence
                                          ? json("exact")
                                          : json(pr.defect_valuation)}});
    json out{{"command", "tower-compat"},
             {"config", config_json(cfg)},
             {"file", path},
             {"level_pairs", pairs},
             {"all_exact", rep.all_exact}};
    return emit(cfg, out, rep.all_exact);
}

// ------------------------------------------------------------------- amice --

int run_amice(const RunConfig& cfg, const std::string& example, int lev1,
              int lev2, long long shear, const std::string& shear_coord,
              const std::string& order_a, const std::string& order_b,
              int max_k) {
    BigRational a = parse_rational(order_a);
    BigRational b = parse_rational(order_b);
    CellDistribution2D mu = cell_zero(cfg.p, lev1, lev2, a, b);
    if (example == "haar") {
        mu = cell_haar(cfg.p, lev1, lev2);
    } else if (example == "dirac") {
        mu = cell_dirac(cfg.p, lev1, lev2, 0, 0);
    } else if (example == "dirac-haar") {
        BigRational share =
            BigRational(1) / BigRational(BigInt(detail::upow_checked(cfg.p, lev2)));
        for (std::uint64_t a2 = 0; a2 < mu.mod2(); ++a2)
            mu.at(1 % mu.mod1(), a2) = share;
    } else {
        throw std::invalid_argument("unknown example '" + example +
                                    "', expected haar, dirac or dirac-haar");
    }
    mu.order1 = a;
    mu.order2 = b;
    if (shear_coord == "first")
        mu = shear_push(mu, shear, false);
    else if (shear_coord == "second")
        mu = shear_push(mu, shear, true);
    else if (shear_coord != "none")
        throw std::invalid_argument("shear coordinate must be first, second or none");

    GrowthReport g = growth_constant(mu, a, b, max_k);
    json cells = json::array();
    for (std::uint64_t a1 = 0; a1 < mu.mod1(); ++a1)
        for (std::uint64_t a2 = 0; a2 < mu.mod2(); ++a2)
            if (mu.at(a1, a2) != 0)
                cells.push_back(json::array({a1, a2, rat_str(mu.at(a1, a2))}));
    json out{{"command", "amice"},
             {"config", config_json(cfg)},
             {"example", example},
             {"shear", shear},
             {"shear_coordinate", shear_coord},
             {"table",
              json{{"p", cfg.p},
                   {"bilevel", json::array({lev1, lev2})},
                   {"cells", cells}}},
             {"order", json::array({rat_str(a), rat_str(b)})},
             {"max_k", max_k},
             {"growth",
              json{{"constant", rat_str(g.constant)},
                   {"bounded", g.bounded},
                   {"single_constant", rat_str(g.single_constant)},
                   {"single_bounded", g.single_bounded}}}};
    return emit(cfg, out, g.bounded);
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"p-adic measure and local-constant workbench"};
    app.require_subcommand(1);
    app.add_option("--p", cfg.p, "odd prime")->capture_default_str();
    app.add_option("--digits", cfg.digits, "certified p-adic digits")
        ->capture_default_str();
    app.add_option("--guard", cfg.guard, "guard digits for lossy steps")
        ->capture_default_str();
    app.add_option("--pi-terms", cfg.pi_terms, "tracked power series terms")
        ->capture_default_str();
    app.add_option("--level", cfg.level, "cyclotomic level cap")
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "seed for the seeded inputs")
        ->capture_default_str();
    app.add_option("--json-out", cfg.json_out,
                   "also write the payload to this file");

    long long kl_a = 2;
    int kl_k = 4;
    CLI::App* kl = app.add_subcommand(
        "kubota-leopoldt", "moment of the cyclotomic-unit regulator vs oracle");
    kl->fallthrough();
    kl->add_option("--a", kl_a, "unit branch exponent")->capture_default_str();
    kl->add_option("--k", kl_k, "moment index")->capture_default_str();

    long long cc_a = 2;
    int cc_levels = 3;
    CLI::App* cc = app.add_subcommand(
        "coleman-check", "interpolation and norm-fixed-point certificates");
    cc->fallthrough();
    cc->add_option("--a", cc_a, "unit branch exponent")->capture_default_str();
    cc->add_option("--levels", cc_levels, "torsion levels to certify")
        ->capture_default_str();

    std::string me_kind = "dirac";
    std::uint64_t me_gelt = 1;
    CLI::App* me = app.add_subcommand("mellin", "measure to power series");
    me->fallthrough();
    me->add_option("--measure", me_kind, "dirac | uniform | seeded")
        ->capture_default_str();
    me->add_option("--gelt", me_gelt, "group element for dirac")
        ->capture_default_str();

    int ec_tame = 1, ec_wl = 1, ec_weight = 0;
    std::uint64_t ec_wild = 0, ec_gelt = 2;
    std::string ec_kind = "seeded";
    CLI::App* ec = app.add_subcommand(
        "eval-character", "dual-route character evaluation with certificate");
    ec->fallthrough();
    ec->add_option("--tame", ec_tame, "tame exponent")->capture_default_str();
    ec->add_option("--wild-level", ec_wl, "wild level")->capture_default_str();
    ec->add_option("--wild", ec_wild, "wild exponent")->capture_default_str();
    ec->add_option("--weight", ec_weight, "integer weight j")
        ->capture_default_str();
    ec->add_option("--measure", ec_kind, "dirac | uniform | seeded")
        ->capture_default_str();
    ec->add_option("--gelt", ec_gelt, "group element for dirac")
        ->capture_default_str();

    int gs_tame = 2, gs_wl = 1;
    std::uint64_t gs_wild = 0;
    long long gs_gamma = 1;
    CLI::App* gs = app.add_subcommand("gauss-sum",
                                      "character sum with pairing audit");
    gs->fallthrough();
    gs->add_option("--tame", gs_tame, "tame exponent")->capture_default_str();
    gs->add_option("--wild-level", gs_wl, "wild level")->capture_default_str();
    gs->add_option("--wild", gs_wild, "wild exponent")->capture_default_str();
    gs->add_option("--gamma", gs_gamma, "root-of-unity reindexing")
        ->capture_default_str();

    int ep_tame = 1, ep_wl = 1, ep_weight = 0;
    std::uint64_t ep_wild = 0, ep_frob = 1;
    CLI::App* ep = app.add_subcommand(
        "epsilon", "local constant by the closed form and the direct sum");
    ep->fallthrough();
    ep->add_option("--tame", ep_tame, "tame exponent")->capture_default_str();
    ep->add_option("--wild-level", ep_wl, "wild level")->capture_default_str();
    ep->add_option("--wild", ep_wild, "wild exponent")->capture_default_str();
    ep->add_option("--weight", ep_weight, "integer weight j")
        ->capture_default_str();
    ep->add_option("--frob-teich", ep_frob,
                   "Frobenius value: Teichmuller lift of this residue")
        ->capture_default_str();

    int yg_steps = 3;
    CLI::App* yg = app.add_subcommand(
        "yager", "emit a trace-compatible unramified tower with its assembly audit");
    yg->fallthrough();
    yg->add_option("--steps", yg_steps, "tower levels (degrees p^0..p^(steps-1))")
        ->capture_default_str();

    std::string tc_file = "-";
    CLI::App* tc = app.add_subcommand(
        "tower-compat", "cross-level congruence report for a tower file");
    tc->fallthrough();
    tc->add_option("--file", tc_file, "tower JSON path, - for stdin")
        ->capture_default_str();

    std::string am_example = "haar", am_coord = "none";
    std::string am_a = "1", am_b = "1";
    int am_lev1 = -1, am_lev2 = -1, am_maxk = 0;
    long long am_shear = 1;
    CLI::App* am = app.add_subcommand(
        "amice", "two-variable cell table with its growth constants");
    am->fallthrough();
    am->add_option("--example", am_example, "haar | dirac | dirac-haar")
        ->capture_default_str();
    am->add_option("--lev1", am_lev1, "first bi-level (default: --level)");
    am->add_option("--lev2", am_lev2, "second bi-level (default: --level)");
    am->add_option("--shear", am_shear, "shear multiplier")->capture_default_str();
    am->add_option("--shear-coord", am_coord, "none | first | second")
        ->capture_default_str();
    am->add_option("--order-a", am_a, "claimed order in x1, rational")
        ->capture_default_str();
    am->add_option("--order-b", am_b, "claimed order in x2, rational")
        ->capture_default_str();
    am->add_option("--max-k", am_maxk, "moment exponent bound")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << "run with --help for usage\n";
        return 2;
    }

    std::string command;
    try {
        if (app.got_subcommand(kl)) {
            command = "kubota-leopoldt";
            return run_kubota_leopoldt(cfg, kl_a, kl_k);
        }
        if (app.got_subcommand(cc)) {
            command = "coleman-check";
            return run_coleman_check(cfg, cc_a, cc_levels);
        }
        if (app.got_subcommand(me)) {
            command = "mellin";
            return run_mellin(cfg, me_kind, me_gelt);
        }
        if (app.got_subcommand(ec)) {
            command = "eval-character";
            return run_eval_character(cfg, ec_tame, ec_wl, ec_wild, ec_weight,
                                      ec_kind, ec_gelt);
        }
        if (app.got_subcommand(gs)) {
            command = "gauss-sum";
            return run_gauss_sum(cfg, gs_tame, gs_wl, gs_wild, gs_gamma);
        }
        if (app.got_subcommand(ep)) {
            command = "epsilon";
            return run_epsilon(cfg, ep_tame, ep_wl, ep_wild, ep_weight, ep_frob);
        }
        if (app.got_subcommand(yg)) {
            command = "yager";
            return run_yager(cfg, yg_steps);
        }
        if (app.got_subcommand(tc)) {
            command = "tower-compat";
            return run_tower_compat(cfg, tc_file);
        }
        if (app.got_subcommand(am)) {
            command = "amice";
            if (am_lev1 < 0)
                am_lev1 = cfg.level;
            if (am_lev2 < 0)
                am_lev2 = cfg.level;
            return run_amice(cfg, am_example, am_lev1, am_lev2, am_shear,
                             am_coord, am_a, am_b, am_maxk);
        }
        std::cerr << "no command given; run with --help for usage\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        return emit(cfg,
                    json{{"command", command},
                         {"config", config_json(cfg)},
                         {"error", json{{"type", "precondition"},
                                        {"message", e.what()}}}},
                    false);
    } catch (const std::domain_error& e) {
        return emit(cfg,
                    json{{"command", command},
                         {"config", config_json(cfg)},
                         {"error", json{{"type", "precondition"},
                                        {"message", e.what()}}}},
                    false);
    } catch (const std::out_of_range& e) {
        return emit(cfg,
                    json{{"command", command},
                         {"config", config_json(cfg)},
                         {"error", json{{"type", "precondition"},
                                        {"message", e.what()}}}},
                    false);
    } catch (const std::logic_error& e) {
        return emit(cfg,
                    json{{"command", command},
                         {"config", config_json(cfg)},
                         {"error", json{{"type", "certificate"},
                                        {"message", e.what()}}}},
                    false);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
