#include <crjet/blowup.hpp>
#include <crjet/cli.hpp>
#include <crjet/crsystem.hpp>
#include <crjet/errors.hpp>
#include <crjet/io.hpp>
#include <crjet/lifting.hpp>
#include <crjet/linalg.hpp>
#include <crjet/normalform.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace crjet
{

namespace
{

struct Job {
    std::string command;
    std::string input;
    std::string map_path;
    std::optional<int> trunc;
    std::string backend = "exact";
    std::optional<int> jet;
    std::optional<int> lift_order;
    std::string out_dir;
};

// Report text plus named artifacts, and the exit status of the command.
struct JobResult {
    std::ostringstream report;
    std::map<std::string, std::string> artifacts;
    int status = exit_ok;

    void fail() { status = exit_check_failed; }
};

std::string yes_no(bool b)
{
    return b ? "yes" : "no";
}

std::string verdict(const CheckReport &r)
{
    return r.ok ? "yes (to order " + std::to_string(r.trunc) + ")" : "no: " + r.describe();
}

std::string signs(const std::vector<int> &eps)
{
    std::string out = "(";
    for (std::size_t j = 0; j < eps.size(); ++j) {
        out += (j ? "," : "") + std::string(eps[j] > 0 ? "+1" : "-1");
    }
    return out + ")";
}

template <typename S>
void truncate_to(Series<S> &f, const std::optional<int> &trunc)
{
    if (!trunc) {
        return;
    }
    if (*trunc < 2) {
        throw ParseError("--trunc must be at least 2", 0);
    }
    if (*trunc > f.trunc()) {
        throw TruncationError("--trunc " + std::to_string(*trunc) + " exceeds the input truncation order "
                              + std::to_string(f.trunc()));
    }
    f = f.truncated(*trunc);
}

// Both representations of the input hypersurface.
template <typename S>
struct Surface {
    ComplexDefining<S> h;
    RealGraph<S> g;
    bool from_complex = false;
};

template <typename S>
Surface<S> load_surface(const Job &job)
{
    auto file = parse_hypersurface<S>(read_file(job.input));
    Surface<S> out;
    if (file.complex) {
        out.from_complex = true;
        out.h = *file.complex;
        truncate_to(out.h.Q, job.trunc);
        const auto normal = check_normal(out.h);
        if (normal.ok) {
            out.g = complex_to_real(out.h);
        }
    } else {
        out.g = *file.real;
        truncate_to(out.g.phi, job.trunc);
        const auto normal = check_real_normal(out.g);
        if (normal.ok) {
            out.h = real_to_complex(out.g);
        }
    }
    return out;
}

template <typename S>
HoloMap<S> load_map(const Job &job)
{
    if (job.map_path.empty()) {
        throw ParseError("this command needs --map FILE", 0);
    }
    return parse_map<S>(read_file(job.map_path));
}

// Normal-form data: a normal-form file is taken as is, a hypersurface file is
// brought to normal form first.
template <typename S>
NormalFormData<S> load_normal_form(const Job &job, JobResult &res)
{
    const std::string text = read_file(job.input);
    if (parse_document(text).find("exponents")) {
        auto nf = parse_normal_form<S>(text);
        if (job.trunc) {
            truncate_to(nf.R, job.trunc);
            for (auto &t : nf.thetas) {
                truncate_to(t, std::optional<int>(std::min(*job.trunc, t.trunc())));
            }
        }
        res.report << "input: normal-form data\n";
        return nf;
    }
    const Surface<S> surf = load_surface<S>(job);
    const auto normal = check_real_normal(surf.g);
    if (!normal.ok) {
        throw DomainError("input is not in normal coordinates: " + normal.describe());
    }
    auto nf = normal_form(surf.g);
    const auto residual = report_zero(normal_form_residual(nf, surf.g), "normal-form coordinate identity");
    res.report << "input: hypersurface, brought to normal form\n";
    res.report << "normal-form residual vanishes: " << verdict(residual) << "\n";
    if (!residual.ok) {
        res.fail();
    }
    return nf;
}

template <typename S>
bool levi_nondegenerate_at_origin(const RealGraph<S> &g)
{
    const auto A = levi_matrix_along_axis(g);
    const std::size_t n = A.size();
    DenseMatrix<RealOf<S>> M(2 * n, 2 * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            const S c = A[j][k].constant_term();
            M(j, k) = c.re;
            M(j, n + k) = -c.im;
            M(n + j, k) = c.im;
            M(n + j, n + k) = c.re;
        }
    }
    if constexpr (ScalarTraits<S>::exact) {
        return rank_exact(M) == static_cast<int>(2 * n);
    } else {
        return rank_float(M, RealOf<S>("1e-25")) == static_cast<int>(2 * n);
    }
}

template <typename S>
void describe_type(const Surface<S> &surf, JobResult &res)
{
    const auto type = infinite_type_order(surf.g);
    switch (type.kind) {
    case InfiniteTypeResult::Kind::Minimal:
        res.report << "type: minimal ("
                   << (levi_nondegenerate_at_origin(surf.g) ? "Levi-nondegenerate" : "Levi-degenerate")
                   << " at 0), truncation " << type.tested_trunc << "\n";
        return;
    case InfiniteTypeResult::Kind::Flat:
        res.report << "type: flat to truncation " << type.tested_trunc << "\n";
        return;
    case InfiniteTypeResult::Kind::Order:
        break;
    }
    res.report << "type: nonminimal, infinite type m=" << type.m << " at truncation " << type.tested_trunc << "\n";
    if (const auto good = is_good_nonminimal(surf.h)) {
        res.report << "good nonminimal: m=" << good->m << ", eps=" << signs(good->epsilons) << "\n";
        return;
    }
    try {
        const auto norm = normalize_good(surf.h);
        if (const auto good = is_good_nonminimal(norm.h)) {
            res.report << "good nonminimal after rescaling z_j -> z_j / sqrt(c_j): m=" << good->m
                       << ", eps=" << signs(good->epsilons) << "\n";
            return;
        }
        res.report << "good nonminimal: no (tau^" << norm.m
                   << " coefficient normalizes, but Q - tau - i tau^m <z,chi> is not divisible by tau^" << norm.m + 1
                   << ")\n";
    } catch (const DomainError &e) {
        res.report << "good nonminimal: no (" << e.what() << ")\n";
    }
}

template <typename S>
void cmd_check(const Job &job, JobResult &res)
{
    const Surface<S> surf = load_surface<S>(job);
    const auto normal = surf.from_complex ? check_normal(surf.h) : check_real_normal(surf.g);
    res.report << "trunc: " << (surf.from_complex ? surf.h.Q.trunc() : surf.g.phi.trunc()) << "\n";
    res.report << "normal: " << verdict(normal) << "\n";
    if (!normal.ok) {
        res.fail();
        return;
    }
    if (surf.from_complex) {
        res.report << "reality: " << verdict(check_reality(surf.g)) << "\n";
    }
    describe_type(surf, res);
    if (!job.map_path.empty()) {
        const auto H = load_map<S>(job);
        const auto pres = check_preserves(H, surf.h);
        res.report << "map preserves the hypersurface: " << verdict(pres) << "\n";
        if (!pres.ok) {
            res.fail();
        }
    }
}

template <typename S>
void cmd_normal_form(const Job &job, JobResult &res)
{
    const Surface<S> surf = load_surface<S>(job);
    const auto nf = normal_form(surf.g);
    const auto residual = report_zero(normal_form_residual(nf, surf.g), "normal-form coordinate identity");
    const auto shape = check_normal_form_shape(nf);
    res.report << "trunc: " << surf.g.phi.trunc() << "\n";
    res.report << "exponents b: " << format_ints(nf.exponents) << "\n";
    res.report << "epsilons: " << format_ints(nf.epsilons) << "\n";
    res.report << "shape (b sorted, theta(0) = 1, R normal): " << verdict(shape) << "\n";
    res.report << "coordinate identity: " << verdict(residual) << "\n";
    res.artifacts["normal_form.txt"] = format_normal_form(nf);
    res.report << "--- normal form\n" << format_normal_form(nf);
    if (!residual.ok || !shape.ok) {
        res.fail();
    }
}

template <typename S>
struct BlowupStage {
    NormalFormData<S> nf;
    BlowupData<S> bd;
    std::optional<MhatForm<S>> good;
};

template <typename S>
BlowupStage<S> run_blowup(const Job &job, JobResult &res)
{
    BlowupStage<S> st;
    st.nf = load_normal_form<S>(job, res);
    res.report << "exponents b: " << format_ints(st.nf.exponents) << "\n";
    st.bd = solve_blowup(st.nf);
    res.report << "alphas: " << format_ints(st.bd.alphas) << "\n";
    res.report << "threshold: " << st.bd.threshold << "\n";
    res.report << "certified order of eta: " << st.bd.certified_order << "\n";
    res.report << "fixed-point iterations: " << st.bd.fixed_point_iterations << "\n";
    const auto inv = check_blowup_invariants(st.bd, st.nf.exponents);
    res.report << "exponent identities and eta boundary values: " << verdict(inv) << "\n";
    const auto mem = report_zero(blowup_membership_residual(st.bd, st.nf), "Mhat lies in the preimage of M");
    res.report << "Mhat lies in B^-1(M): " << verdict(mem) << "\n";
    if (!inv.ok || !mem.ok) {
        res.fail();
    }
    try {
        st.good = mhat_good_form(st.bd);
        bool rescaled = false;
        for (const auto &c : st.good->scales) {
            rescaled = rescaled || c != 1;
        }
        res.report << "Mhat good nonminimal: m=" << st.good->form.m << ", eps=" << signs(st.good->form.epsilons)
                   << (rescaled ? " (after rescaling)" : "") << ", Q known to order " << st.good->h.Q.trunc() << "\n";
        res.artifacts["mhat.hyp"] = format_hypersurface(st.good->h);
    } catch (const DomainError &e) {
        res.report << "Mhat good nonminimal: no (" << e.what() << ")\n";
        res.fail();
    }
    res.artifacts["blowup.txt"] = format_blowup(st.bd);
    return st;
}

template <typename S>
void cmd_blowup(const Job &job, JobResult &res)
{
    const auto st = run_blowup<S>(job, res);
    res.report << "--- blow-up\n" << format_blowup(st.bd);
}

// Lifts H through the blow-up of nf and certifies the result. Returns the lift.
template <typename S>
HoloMap<S> lift_stage(const HoloMap<S> &H, const NormalFormData<S> &nf, const std::optional<BlowupData<S>> &bd,
                      int l, JobResult &res)
{
    const auto ex = blowup_exponents(nf);
    res.report << "lift order l: " << l << " (minimum " << minimal_lift_order(ex) << ")\n";
    const auto pres = check_preserves(H, real_to_complex(normal_form_graph(nf)));
    res.report << "H preserves M: " << verdict(pres) << "\n";
    const auto Hhat = lift_map(H, ex.alphas, l);
    res.report << "lift known to order: " << Hhat.trunc() << "\n";
    const auto square = check_commuting_square(H, Hhat, ex.alphas);
    const auto jet = check_jet_identity(Hhat, l);
    const auto shape = check_ghat_shape(Hhat, 2 * (l + 1));
    const auto shape_weak = check_ghat_shape(Hhat, 2 * l + 1);
    res.report << "commuting square B o Hhat = H o B: " << verdict(square) << "\n";
    res.report << "jet(Hhat, l) = jet(Id, l): " << verdict(jet) << "\n";
    res.report << "Ghat - w = O(w^" << 2 * (l + 1) << "): " << verdict(shape) << "\n";
    res.report << "Ghat - w = O(w^" << 2 * l + 1 << "): " << verdict(shape_weak) << "\n";
    if (!square.ok || !jet.ok) {
        res.fail();
    }
    if (pres.ok) {
        const BlowupData<S> data = bd ? *bd : solve_blowup(nf);
        const auto hat = check_preserves(Hhat, real_to_complex(data.Mhat));
        res.report << "Hhat preserves Mhat: " << verdict(hat) << "\n";
        if (!hat.ok) {
            res.fail();
        }
    } else {
        res.report << "Hhat preserves Mhat: not applicable (H does not preserve M)\n";
    }
    res.artifacts["lift.map"] = format_map(Hhat);
    return Hhat;
}

template <typename S>
void cmd_lift(const Job &job, JobResult &res)
{
    const auto nf = load_normal_form<S>(job, res);
    const auto H = load_map<S>(job);
    const int l = job.lift_order ? *job.lift_order : minimal_lift_order(blowup_exponents(nf));
    const auto Hhat = lift_stage<S>(H, nf, std::nullopt, l, res);
    res.report << "--- lift\n" << format_map(Hhat);
}

// Probes at the given K, or sweeps K = 0, 1, ... until a non-vacuous
// "determined" verdict or until the window is empty.
template <typename S>
std::optional<ProbeResult<S>> probe_stage(const ComplexDefining<S> &h, const std::optional<int> &jet, JobResult &res,
                                          bool &vacuous)
{
    vacuous = false;
    const auto normal = check_normal(h);
    if (!normal.ok) {
        throw DomainError("probe needs normal coordinates: " + normal.describe());
    }
    const int N = h.Q.trunc();
    res.report << "probe truncation N: " << N << ", highest unknown degree " << probe_max_degree(h, N) << "\n";
    const int first = jet ? *jet : 0;
    const int last = jet ? *jet : N;
    std::optional<ProbeResult<S>> found;
    for (int K = first; K <= last; ++K) {
        auto pr = jet_determination_probe(h, K, N);
        res.report << pr.report();
        if (pr.vacuous) {
            vacuous = true;
            break;
        }
        if (pr.determined || jet) {
            found = std::move(pr);
            break;
        }
    }
    return found;
}

template <typename S>
void cmd_probe(const Job &job, JobResult &res)
{
    const Surface<S> surf = load_surface<S>(job);
    bool vacuous = false;
    const auto pr = probe_stage<S>(surf.h, job.jet, res, vacuous);
    if (pr && pr->determined) {
        res.report << "result: determined by " << pr->K << "-jets at truncation " << pr->N << "\n";
    } else if (pr) {
        res.report << "result: free directions at degree " << pr->first_free_degree << " with K = " << pr->K << "\n";
    } else {
        res.report << "result: no determined verdict before the probe window closed; raise the truncation\n";
        res.status = exit_truncation;
    }
}

template <typename S>
void cmd_pipeline(const Job &job, JobResult &res)
{
    auto st = run_blowup<S>(job, res);
    res.artifacts["normal_form.txt"] = format_normal_form(st.nf);
    const auto ex = blowup_exponents(st.nf);
    const int l = job.lift_order ? *job.lift_order : minimal_lift_order(ex);

    std::optional<ProbeResult<S>> pr;
    if (st.good) {
        res.report << "--- probe of Mhat\n";
        bool vacuous = false;
        pr = probe_stage<S>(st.good->h, job.jet, res, vacuous);
        if (pr && pr->determined) {
            res.report << "Mhat determined by " << pr->K << "-jets at truncation " << pr->N << "\n";
        } else {
            res.report << "Mhat: no determined verdict at this truncation\n";
        }
        std::ostringstream probe_text;
        probe_text << pr.value_or(ProbeResult<S>{}).report();
        res.artifacts["probe.txt"] = probe_text.str();
    }

    res.report << "--- lift\n";
    HoloMap<S> H;
    if (!job.map_path.empty()) {
        H = load_map<S>(job);
        res.report << "map: " << job.map_path << "\n";
    } else {
        // An automorphism of M with identity l-jet, produced by the same Newton
        // solver the probe uses for its free directions.
        const auto hM = real_to_complex(normal_form_graph(st.nf));
        H = generate_automorphism(hM, l, hM.Q.trunc(), HoloMap<S>{});
        res.report << "map: generated automorphism of M with identity " << l << "-jet, known to order " << H.trunc()
                   << "\n";
    }
    const auto Hhat = lift_stage<S>(H, st.nf, st.bd, l, res);
    if (pr && pr->determined && !job.map_path.empty()) {
        return;
    }
    if (pr && pr->determined) {
        const bool trivial = jet_is_identity(Hhat, Hhat.trunc());
        res.report << "Hhat has identity " << l << "-jet and Mhat is determined by " << pr->K
                   << "-jets: " << (l >= pr->K ? "Hhat = Id expected" : "no conclusion (l < K)") << "; Hhat = Id to order "
                   << Hhat.trunc() << ": " << yes_no(trivial) << "\n";
        if (l >= pr->K && !trivial) {
            res.fail();
        }
    }
}

template <typename S>
void dispatch(const Job &job, JobResult &res)
{
    if (job.command == "check") {
        cmd_check<S>(job, res);
    } else if (job.command == "normal-form") {
        cmd_normal_form<S>(job, res);
    } else if (job.command == "blowup") {
        cmd_blowup<S>(job, res);
    } else if (job.command == "lift") {
        cmd_lift<S>(job, res);
    } else if (job.command == "probe") {
        cmd_probe<S>(job, res);
    } else {
        cmd_pipeline<S>(job, res);
    }
}

void write_outputs(const Job &job, const JobResult &res, const std::string &report)
{
    if (job.out_dir.empty()) {
        return;
    }
    std::filesystem::create_directories(job.out_dir);
    write_file((std::filesystem::path(job.out_dir) / "report.txt").string(), report);
    for (const auto &[name, text] : res.artifacts) {
        write_file((std::filesystem::path(job.out_dir) / name).string(), text);
    }
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    Job job;
    CLI::App app{"Truncated power-series toolkit for real hypersurfaces, blow-ups and jet determination", "crjet"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);
    auto common = [&job](CLI::App *sub, bool with_map) {
        sub->add_option("input", job.input, "hypersurface or normal-form file")->required();
        sub->add_option("--trunc", job.trunc, "truncate the input to this order (>= 2)");
        sub->add_option("--backend", job.backend, "scalar backend")->check(CLI::IsMember({"exact", "float"}));
        sub->add_option("--out", job.out_dir, "directory for the report and artifacts");
        if (with_map) {
            sub->add_option("--map", job.map_path, "map file (F1..Fn, G blocks)");
        }
    };
    auto *check = app.add_subcommand("check", "normality, type and good-form recognition; optional map check");
    common(check, true);
    auto *nf = app.add_subcommand("normal-form", "normal form along the axis");
    common(nf, false);
    auto *blow = app.add_subcommand("blowup", "blow-up of a normal form and the blown-up hypersurface");
    common(blow, false);
    auto *lift = app.add_subcommand("lift", "lift a map through the blow-up");
    common(lift, true);
    lift->add_option("--lift-order", job.lift_order, "jet order l of the lift");
    auto *probe = app.add_subcommand("probe", "jet determination probe");
    common(probe, false);
    probe->add_option("--jet", job.jet, "jet order K (default: sweep upward)");
    auto *pipe = app.add_subcommand("pipeline", "normal form, blow-up, probe of the blow-up, lift");
    common(pipe, true);
    pipe->add_option("--jet", job.jet, "jet order K for the probe (default: sweep upward)");
    pipe->add_option("--lift-order", job.lift_order, "jet order l of the lift");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForVersion &e) {
        out << tool_version << "\n";
        return exit_ok;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    }
    for (auto *sub : app.get_subcommands()) {
        job.command = sub->get_name();
    }

    JobResult res;
    res.report << tool_version << "\ncommand: " << job.command << "\ninput: " << job.input
               << "\nbackend: " << job.backend << "\n";
    if (job.trunc) {
        res.report << "trunc override: " << *job.trunc << "\n";
    }
    try {
        if (job.backend == "exact") {
            dispatch<Gaussian>(job, res);
        } else {
            dispatch<FloatComplex>(job, res);
        }
    } catch (const ParseError &e) {
        err << "input error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const TruncationError &e) {
        res.report << "truncation insufficient: " << e.what() << "\n";
        out << res.report.str();
        return exit_truncation;
    } catch (const Error &e) {
        res.report << "failed: " << e.what() << "\n";
        out << res.report.str();
        return exit_check_failed;
    }
    res.report << "status: " << (res.status == exit_ok ? "ok" : "failed") << "\n";
    const std::string report = res.report.str();
    out << report;
    try {
        write_outputs(job, res, report);
    } catch (const std::exception &e) {
        err << "cannot write outputs: " << e.what() << "\n";
        return exit_input_error;
    }
    return res.status;
}

} // namespace crjet
