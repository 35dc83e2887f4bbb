#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "nilcube/catalog.hpp"
#include "nilcube/cocycles.hpp"
#include "nilcube/cubespace.hpp"
#include "nilcube/filtered.hpp"
#include "nilcube/io.hpp"
#include "nilcube/structure.hpp"
#include "nilcube/translations.hpp"

using namespace nilcube;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kBudget = 3 };

struct Options {
    SpaceSpec space;
    std::string format = "machine";
    unsigned threads = 0;
    int at_step = -1;
    int level = 1;
    int height = 1;
    int dim = 2;
    int n = 2;
    std::string out;
    std::string cocycle;
    std::string coeff = "[2]";
    std::string map;
    std::string ext = "z4";
    std::uint64_t seed = 1;
    std::uint64_t reduce = 0;
    std::string target_file;
    std::string lift;
    std::string chain = "8,4,2";
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

std::vector<Point> parse_points(const Cubespace& X, const std::string& s) {
    std::vector<Point> out;
    for (auto& tok : split(s, ',')) {
        auto p = X.find_label(tok);
        if (!p) throw Error(ErrorKind::Config, "unknown point '" + tok + "'");
        out.push_back(*p);
    }
    return out;
}

std::string join_labels(const Cubespace& X, const std::vector<Point>& f) {
    std::string s;
    for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + X.label(f[i]);
    return s;
}

std::string join_factors(const std::vector<std::uint64_t>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + "]";
}

void describe(Report& R, const Cubespace& X) {
    R.set("space", X.name);
    R.set("points", static_cast<std::uint64_t>(X.size()));
    R.set("declared_step", X.declared_step ? std::to_string(*X.declared_step) : std::string("none"));
    R.set("nmax", X.nmax());
    for (int n = 0; n <= X.nmax(); ++n) R.set("cubes." + std::to_string(n), static_cast<std::uint64_t>(X.count(n)));
}

int step_of(const Options& o, const Cubespace& X) {
    if (o.at_step >= 0) return o.at_step;
    if (!X.declared_step) throw Error(ErrorKind::Config, "space has no declared step; pass --at-step");
    return *X.declared_step;
}

Cocycle load_cocycle(const Options& o, const CubespacePtr& X) {
    if (o.cocycle.empty()) throw Error(ErrorKind::Config, "--cocycle is required");
    std::ifstream in(o.cocycle);
    if (!in) throw Error(ErrorKind::Config, "cannot open " + o.cocycle);
    return read_cocycle(in, X);
}

FilteredGroup group_of(const Options& o) {
    const auto& s = o.space;
    if (s.kind == "heis") return heisenberg(s.p);
    if (s.kind == "cyclic-deg2") return cyclic_deg2(s.N);
    if (s.kind == "dk") return abelian_filtered(FiniteAbelianGroup::parse(s.group), s.step);
    if (s.kind == "quotient" || s.kind == "file") {
        if (s.file.empty()) throw Error(ErrorKind::Config, "--file must name a group file");
        return load_group(s.file);
    }
    throw Error(ErrorKind::Config, "hk needs a group: --space heis|cyclic-deg2|dk|quotient");
}

// Each command fills the report and returns its verdict exit code.
using Command = std::function<int(const Options&, Report&)>;

int cmd_gen(const Options& o, Report& R) {
    auto X = make_space(o.space);
    describe(R, *X);
    if (o.out.empty()) throw Error(ErrorKind::Config, "gen needs --out");
    save_space(o.out, *X);
    R.set("written", o.out);
    return kPass;
}

int cmd_check(const Options& o, Report& R) {
    auto X = make_space(o.space);
    describe(R, *X);
    int k = step_of(o, *X);
    auto A = cs_check_axioms(*X, k);
    R.set("step", k);
    R.set("cu0", A.cu0);
    R.set("ergodic", A.ergodic);
    R.set("composition", A.composition);
    R.set("completion", A.completion);
    R.set("k_step", A.k_step);
    R.set("face_criterion", A.face_criterion);
    R.set("minimal_step", A.minimal_step ? std::to_string(*A.minimal_step) : std::string("unknown"));
    for (auto& w : A.witnesses) R.add_witness(w);
    return A.all_pass() ? kPass : kFail;
}

int cmd_factor(const Options& o, Report& R) {
    auto X = make_space(o.space);
    describe(R, *X);
    auto F = factor(X, o.level);
    R.set("level", o.level);
    R.set("factor.points", static_cast<std::uint64_t>(F.space->size()));
    for (int n = 0; n <= F.space->nmax(); ++n)
        R.set("factor.cubes." + std::to_string(n), static_cast<std::uint64_t>(F.space->count(n)));
    R.set("projection", join_labels(*F.space, F.projection.map));
    if (!o.out.empty()) {
        save_space(o.out, *F.space);
        R.set("written", o.out);
    }
    return kPass;
}

int cmd_structure(const Options& o, Report& R) {
    auto X = make_space(o.space);
    describe(R, *X);
    auto B = bundle_decompose(X, o.at_step);
    R.set("step", B.k);
    for (int i = 0; i <= B.k; ++i) {
        R.set("level." + std::to_string(i) + ".points", static_cast<std::uint64_t>(B.levels[i].space->size()));
        if (i > 0) R.set("level." + std::to_string(i) + ".group", B.groups[i].descriptor());
    }
    R.set("rank", static_cast<std::uint64_t>(B.rank));
    R.set("tower_consistent", B.tower_consistent);
    R.set("actions_ok", B.actions_ok);
    R.set("difference_condition", B.difference_condition);
    for (auto& w : B.witnesses) R.add_witness(w);
    return B.ok() ? kPass : kFail;
}

int cmd_hk(const Options& o, Report& R) {
    auto G = group_of(o);
    R.set("group", G.name);
    R.set("order", static_cast<std::uint64_t>(G.order()));
    R.set("degree", G.degree());
    R.set("n", o.n);
    auto fr = filt_validate(G);
    R.set("filtration_valid", fr.valid);
    std::uint64_t count = 0, bad = 0;
    hk_for_each(G, o.n, [&](const std::vector<Elem>& q) {
        ++count;
        auto f = hk_factorize(G, o.n, q);
        if (!f.factorization || hk_recompose(G, o.n, *f.factorization) != q) {
            if (bad++ == 0) {
                std::string w = "cube ";
                for (std::size_t i = 0; i < q.size(); ++i) w += (i ? "," : "") + G.labels()[q[i]];
                R.add_witness(w + " does not factor back to itself");
            }
        }
    });
    R.set("cubes", count);
    R.set("expected", hk_count(G, o.n));
    R.set("roundtrip_failures", bad);
    return fr.valid && bad == 0 && count == hk_count(G, o.n) ? kPass : kFail;
}

int cmd_cocycle_verify(const Options& o, Report& R) {
    auto X = make_space(o.space);
    describe(R, *X);
    auto rho = load_cocycle(o, X);
    auto V = cocycle_verify(rho);
    R.set("dim", rho.dim);
    R.set("coefficients", rho.A.descriptor());
    R.set("automorphism", V.automorphism);
    R.set("concatenation", V.concatenation);
    R.set("checked_pairs", V.checked_pairs);
    for (auto& w : V.violations) R.add_witness(w);
    return V.ok() ? kPass : kFail;
}

int cmd_cocycle_coboundary(const Options& o, Report& R) {
    auto X = make_space(o.space);
    describe(R, *X);
    auto rho = load_cocycle(o, X);
    auto S = coboundary_solve(rho);
    R.set("coboundary", S.has_value());
    if (!S) return kFail;
    R.set("path", S->path == SolvePath::Averaging ? "averaging" : "linear");
    for (Point x = 0; x < X->size(); ++x) R.set("g." + X->label(x), S->g[x].str());
    return kPass;
}

int cmd_cocycle_extend(const Options& o, Report& R) {
    auto X = make_space(o.space);
    auto rho = load_cocycle(o, X);
    auto M = build_extension(rho);
    describe(R, *M.space);
    int k = *M.space->declared_step;
    auto A = cs_check_axioms(*M.space, k);
    R.set("step", k);
    R.set("axioms", A.all_pass());
    for (auto& w : A.witnesses) R.add_witness(w);
    if (!o.out.empty()) {
        save_space(o.out, *M.space);
        R.set("written", o.out);
    }
    return A.all_pass() ? kPass : kFail;
}

int cmd_cocycle_fromsection(const Options& o, Report& R) {
    for (auto& e : catalog_extensions(o.space.nmax)) {
        if (e.key != o.ext) continue;
        const auto& E = e.ext;
        R.set("extension", e.name);
        R.set("seed", o.seed);
        std::mt19937_64 rng(o.seed);
        std::vector<std::vector<Point>> fibres(E.base->size());
        for (Point y = 0; y < E.total->size(); ++y) fibres[E.proj[y]].push_back(y);
        std::vector<Point> s(E.base->size());
        for (Point x = 0; x < s.size(); ++x) s[x] = fibres[x][rng() % fibres[x].size()];
        R.set("section", join_labels(*E.total, s));
        auto rho = cocycle_from_section(E, s);
        auto V = cocycle_verify(rho);
        R.set("cocycle_valid", V.ok());
        auto T = extension_theta(E, s);
        R.set("theta", "isomorphism");
        R.set("theta.map", join_labels(*T.target.space, T.map));
        if (!o.out.empty()) {
            std::ofstream out(o.out);
            write_cocycle(out, rho, "catalog:" + e.key + ":base");
            R.set("written", o.out);
        }
        return V.ok() ? kPass : kFail;
    }
    std::string keys;
    for (auto& e : catalog_extensions(o.space.nmax)) keys += " " + e.key;
    throw Error(ErrorKind::Config, "unknown --ext '" + o.ext + "'; choose from" + keys);
}

int cmd_cocycle_average(const Options& o, Report& R) {
    auto X = make_space(o.space);
    describe(R, *X);
    auto rho = load_cocycle(o, X);
    Morphism beta;
    beta.source = X;
    if (o.reduce) {
        if (o.space.kind != "dk") throw Error(ErrorKind::Config, "--reduce works with --space dk");
        auto A = FiniteAbelianGroup::parse(o.space.group);
        if (A.arity() != 1) throw Error(ErrorKind::Config, "--reduce needs a cyclic group");
        auto m = reduction_morphism(A.order(), o.reduce, o.space.step, X->nmax());
        beta.target = m.target;
        beta.map = m.map;
    } else {
        if (o.target_file.empty() || o.map.empty()) throw Error(ErrorKind::Config, "pass --reduce or --target-file and --map");
        beta.target = load_space(o.target_file);
        beta.map = parse_points(*beta.target, o.map);
        if (beta.map.size() != X->size()) throw Error(ErrorKind::Config, "--map needs one target point per point");
    }
    auto avg = average_cocycle(rho, beta);
    auto V = cocycle_verify(avg.rho);
    R.set("averaged.coefficients", avg.rho.A.descriptor());
    R.set("averaged.valid", V.ok());
    R.set("shift", avg.shift.str());
    R.set("fibre_diameter", avg.fibre_diameter.str());
    bool bounded = avg.shift <= avg.fibre_diameter;
    R.set("shift_within_diameter", bounded);
    return V.ok() && bounded ? kPass : kFail;
}

int cmd_cocycle_cohomology(const Options& o, Report& R) {
    auto X = make_space(o.space);
    describe(R, *X);
    auto A = FiniteAbelianGroup::parse(o.coeff);
    auto H = cohomology(X, o.dim, A);
    R.set("dim", o.dim);
    R.set("coefficients", A.descriptor());
    R.set("cocycles", H.cocycles);
    R.set("coboundaries", H.coboundaries);
    R.set("invariant_factors", join_factors(H.invariant_factors));
    R.set("order", H.order);
    return kPass;
}

int cmd_cocycle_tricube(const Options& o, Report& R) {
    auto X = make_space(o.space);
    describe(R, *X);
    auto rho = load_cocycle(o, X);
    auto T = tricube_verify(rho);
    R.set("cubes_checked", T.cubes);
    R.set("pairs", T.pairs);
    R.set("empty_hom_sets", T.empty_hom_sets);
    R.set("identity_holds", T.ok());
    for (auto& w : T.violations) R.add_witness(w);
    return T.ok() ? kPass : kFail;
}

int cmd_trans_enum(const Options& o, Report& R) {
    auto X = make_space(o.space);
    describe(R, *X);
    auto T = translations_enumerate(X, o.height);
    R.set("height", o.height);
    R.set("cap", T.cap);
    R.set("exhaustive", T.exhaustive);
    R.set("translations", static_cast<std::uint64_t>(T.maps.size()));
    for (std::size_t i = 0; i < T.maps.size(); ++i) R.set("map." + std::to_string(i), join_labels(*X, T.maps[i]));
    return kPass;
}

int cmd_trans_check(const Options& o, Report& R) {
    auto X = make_space(o.space);
    describe(R, *X);
    auto alpha = parse_points(*X, o.map);
    auto V = is_translation(*X, alpha, o.height);
    R.set("height", o.height);
    R.set("cap", V.cap);
    R.set("translation", V.ok);
    if (!V.ok) R.add_witness(V.witness);
    return V.ok ? kPass : kFail;
}

int cmd_trans_tau(const Options& o, Report& R) {
    auto X = make_space(o.space);
    describe(R, *X);
    auto T = check_transk_tau(X, o.at_step);
    R.set("translations", static_cast<std::uint64_t>(T.translations));
    R.set("shifts", static_cast<std::uint64_t>(T.shifts));
    R.set("cap", T.cap);
    R.set("tau", tau_verdict_name(T.verdict));
    switch (T.verdict) {
    case TauVerdict::Equal: return kPass;
    case TauVerdict::Different: return kFail;
    case TauVerdict::Inconclusive: return kBudget;
    }
    return kFail;
}

int cmd_rectify(const Options& o, Report& R) {
    auto X = make_space(o.space);
    auto rho = load_cocycle(o, X);
    auto M = build_extension(rho);
    describe(R, *X);
    std::vector<std::string> lift = split(o.lift, ',');
    if (lift.size() != X->size()) throw Error(ErrorKind::Config, "--lift needs one value of A per point");
    std::vector<Point> phi2(X->size()), phi3(X->size());
    for (Point x = 0; x < X->size(); ++x) {
        phi2[x] = x;
        phi3[x] = M.point(x, parse_code(rho.A, lift[x]));
    }
    bool lifted_is_morphism = is_morphism(*X, *M.space, phi3, M.space->nmax());
    R.set("input_is_morphism", lifted_is_morphism);
    auto res = rectify_lifted_map(M, X, phi2, phi3);
    R.set("target.coefficients", res.target.rho.A.descriptor());
    for (Point x = 0; x < X->size(); ++x) R.set("offset." + X->label(x), res.offsets[x].str());
    R.set("verified", "morphism");
    return kPass;
}

int cmd_invsys(const Options& o, Report& R) {
    std::vector<std::uint64_t> orders;
    for (auto& t : split(o.chain, ',')) orders.push_back(std::stoull(t));
    if (orders.empty()) throw Error(ErrorKind::Config, "--chain is empty");
    // spaces[i] = D_k(Z/orders[last - i]) so that index grows with the order.
    std::vector<CubespacePtr> spaces;
    for (auto it = orders.rbegin(); it != orders.rend(); ++it)
        spaces.push_back(make_Dk(FiniteAbelianGroup::cyclic(*it), o.space.step, o.space.nmax));
    std::map<std::pair<int, int>, std::vector<Point>> tr;
    for (int i = 0; i < static_cast<int>(spaces.size()); ++i)
        for (int j = i; j < static_cast<int>(spaces.size()); ++j) {
            std::uint64_t a = spaces[j]->size(), b = spaces[i]->size();
            if (a % b) throw Error(ErrorKind::Config, "chain orders must divide each other");
            std::vector<Point> m(a);
            for (std::uint64_t x = 0; x < a; ++x) m[x] = static_cast<Point>(x % b);
            tr[{i, j}] = m;
        }
    auto S = verify_inverse_system(spaces, tr);
    R.set("chain", o.chain);
    R.set("identities", S.identities);
    R.set("compositions", S.compositions);
    R.set("fibre_surjective", S.fibre_surjective);
    R.set("strict", S.strict());
    for (auto& n : S.notes) R.add_witness(n);
    return S.strict() ? kPass : kFail;
}

void add_space_options(CLI::App* sub, Options& o) {
    sub->add_option("--space", o.space.kind, "dk | heis | cyclic-deg2 | quotient | point | file")
        ->check(CLI::IsMember({"dk", "heis", "cyclic-deg2", "quotient", "point", "file"}));
    sub->add_option("--group", o.space.group, "coefficient group of dk, e.g. 2 or [2,4]");
    sub->add_option("--step", o.space.step, "degree of dk");
    sub->add_option("--p", o.space.p, "modulus of heis");
    sub->add_option("--N", o.space.N, "parameter of cyclic-deg2");
    sub->add_option("--file", o.space.file, "space file, or group file for quotient");
    sub->add_option("--gamma", o.space.gamma, "quotient subgroup as comma separated element labels");
    sub->add_option("--nmax", o.space.nmax, "largest cube dimension")->check(CLI::Range(0, 6));
}

const char* exit_name(int code) {
    switch (code) {
    case kPass: return "pass";
    case kFail: return "fail";
    case kUsage: return "error";
    case kBudget: return "budget";
    }
    return "?";
}

int exit_for(ErrorKind k) {
    switch (k) {
    case ErrorKind::Budget: return kBudget;
    case ErrorKind::Structural:
    case ErrorKind::Config:
    case ErrorKind::Precondition: return kUsage;
    default: return kFail;
    }
}

} // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Finite compact nilspace toolkit"};
    app.require_subcommand(1);
    app.add_option("--format", o.format, "report on stdout: machine | human")->check(CLI::IsMember({"machine", "human"}));
    app.add_option("--threads", o.threads, "worker threads (0 = hardware)");

    std::map<CLI::App*, std::pair<std::string, Command>> commands;
    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, Command fn) {
        auto* sub = parent->add_subcommand(name, help);
        add_space_options(sub, o);
        sub->add_option("--at-step", o.at_step, "step to check instead of the declared one");
        std::string full = parent == &app ? name : parent->get_name() + " " + name;
        commands[sub] = {full, std::move(fn)};
        return sub;
    };

    leaf(&app, "gen", "write a catalog space to a file", cmd_gen)->add_option("--out", o.out, "output file");
    leaf(&app, "check", "check the nilspace axioms", cmd_check);
    {
        auto* s = leaf(&app, "factor", "canonical factor F_k", cmd_factor);
        s->add_option("--level", o.level, "factor level k");
        s->add_option("--out", o.out, "write the factor space");
    }
    leaf(&app, "structure", "bundle decomposition and structure groups", cmd_structure);
    leaf(&app, "hk", "Host-Kra cube factorization round trip", cmd_hk)->add_option("--n", o.n, "cube dimension");

    auto* coc = app.add_subcommand("cocycle", "cocycles, coboundaries and extensions");
    coc->require_subcommand(1);
    auto cocycle_leaf = [&](const std::string& name, const std::string& help, Command fn) {
        auto* s = leaf(coc, name, help, std::move(fn));
        s->add_option("--cocycle", o.cocycle, "cocycle file over the chosen space");
        return s;
    };
    cocycle_leaf("verify", "automorphism and concatenation axioms", cmd_cocycle_verify);
    cocycle_leaf("coboundary", "solve rho = sigma(g o q)", cmd_cocycle_coboundary);
    cocycle_leaf("extend", "build M(rho) and check its axioms", cmd_cocycle_extend)->add_option("--out", o.out);
    {
        auto* s = cocycle_leaf("fromsection", "cocycle of a random cross section of a catalog extension",
                               cmd_cocycle_fromsection);
        s->add_option("--ext", o.ext, "z4 | z9 | split-d1 | split-d2 | heis2 | cyclic2");
        s->add_option("--seed", o.seed);
        s->add_option("--out", o.out, "write the cocycle");
    }
    {
        auto* s = cocycle_leaf("average", "average a cocycle over the fibres of a morphism", cmd_cocycle_average);
        s->add_option("--reduce", o.reduce, "target D_k(Z/b) for the reduction map");
        s->add_option("--target-file", o.target_file);
        s->add_option("--map", o.map, "target point labels, one per source point");
    }
    {
        auto* s = cocycle_leaf("cohomology", "cocycles modulo coboundaries", cmd_cocycle_cohomology);
        s->add_option("--dim", o.dim, "cube dimension of the cocycles");
        s->add_option("--coeff", o.coeff, "coefficient group");
    }
    cocycle_leaf("tricube", "tricube identity for every cube and tricube map", cmd_cocycle_tricube);

    auto* trans = app.add_subcommand("trans", "translations");
    trans->require_subcommand(1);
    leaf(trans, "enum", "enumerate translations of a height", cmd_trans_enum)->add_option("--height", o.height);
    {
        auto* s = leaf(trans, "check", "test one bijection", cmd_trans_check);
        s->add_option("--height", o.height);
        s->add_option("--map", o.map, "image labels, one per point")->required();
    }
    leaf(trans, "tau", "compare Trans_k with the top structure group", cmd_trans_tau);
    {
        auto* s = leaf(&app, "rectify", "turn a lift into a morphism into M(rho)", cmd_rectify);
        s->add_option("--cocycle", o.cocycle, "cocycle file over the chosen space");
        s->add_option("--lift", o.lift, "fibre value per point, comma separated")->required();
    }
    leaf(&app, "invsys", "inverse system of reductions D_k(Z/a) -> D_k(Z/b)", cmd_invsys)
        ->add_option("--chain", o.chain, "orders, each a multiple of the next");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kPass : kUsage;
    }

    Report R;
    int code = kUsage;
    std::string name = "?";
    try {
        Budget::global().load_env();
        if (o.threads) set_thread_count(o.threads);
        for (auto& [sub, cmd] : commands)
            if (sub->parsed()) {
                name = cmd.first;
                R.set("command", name);
                code = cmd.second(o, R);
            }
    } catch (const Error& e) {
        code = exit_for(e.kind());
        R.set("error", error_kind_name(e.kind()));
        R.add_witness(e.what());
    } catch (const std::exception& e) {
        code = kUsage;
        R.set("error", "usage");
        R.add_witness(e.what());
    }
    R.set("verdict", exit_name(code));
    R.set("exit", code);
    if (o.format == "human") {
        R.write_human(std::cout);
        std::cerr << name << ": " << exit_name(code) << "\n";
    } else {
        R.write_machine(std::cout);
        std::cerr << name << ": " << exit_name(code) << "\n";
        R.write_human(std::cerr);
    }
    return code;
}
