// Acceptance run: one PASS/FAIL line per criterion, details on the following indented lines.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "emholo/baseline_ist.hpp"
#include "emholo/log.hpp"
#include "emholo/metrics.hpp"
#include "emholo/phantoms.hpp"
#include "emholo/recon_em.hpp"
#include "emholo/run.hpp"
#include "emholo/spectral.hpp"

using namespace emholo;
namespace fs = std::filesystem;

namespace {

constexpr double kLambda = 675e-9;
constexpr double kPitch = 1.12e-6;

int failures = 0;

void report(int id, const char* title, bool pass, const std::vector<std::string>& details) {
    std::printf("%s %d %s\n", pass ? "PASS" : "FAIL", id, title);
    for (const auto& d : details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

RealGrid2D random_real(std::size_t n, std::uint64_t seed, double lo, double hi) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> d(lo, hi);
    RealGrid2D g(Geometry{n, n, kPitch, kPitch});
    for (auto& v : g) v = d(gen);
    return g;
}

OpticalConfig optics(std::size_t n, std::vector<double> z) {
    OpticalConfig c;
    c.width = n;
    c.height = n;
    c.slice_distances = std::move(z);
    return c;
}

double rel(double a, double b) {
    const double s = std::max(std::fabs(a), std::fabs(b));
    return s > 0.0 ? std::fabs(a - b) / s : 0.0;
}

double rel_distance(const ComplexGrid2D& a, const ComplexGrid2D& b) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num / den);
}

double ncc(const RealGrid2D& a, const RealGrid2D& b) {
    const double ma = mean(a);
    const double mb = mean(b);
    double s = 0.0;
    double sa = 0.0;
    double sb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - ma) * (b[i] - mb);
        sa += (a[i] - ma) * (a[i] - ma);
        sb += (b[i] - mb) * (b[i] - mb);
    }
    return s / std::sqrt(sa * sb);
}

std::vector<double> ssim_curve(const ReconTrace& t) {
    std::vector<double> out;
    for (const auto& r : t.records) out.push_back(r.ssim.value_or(0.0));
    return out;
}

// First iteration (1-based) from which the curve stays at or above `level`; 0 if it never settles there.
int sustained_crossing(const std::vector<double>& curve, double level) {
    int k = 0;
    for (std::size_t i = curve.size(); i-- > 0;) {
        if (curve[i] < level) break;
        k = static_cast<int>(i) + 1;
    }
    return k;
}

// Relative max deviation of the central finite difference of `f` from `grad`, over every pixel of `x`.
double fd_error(std::vector<RealGrid2D>& x, const std::function<double()>& f, const std::vector<RealGrid2D>& grad) {
    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t z = 0; z < x.size(); ++z) {
        for (std::size_t i = 0; i < x[z].size(); ++i) {
            const double keep = x[z][i];
            x[z][i] = keep + h;
            const double fp = f();
            x[z][i] = keep - h;
            const double fm = f();
            x[z][i] = keep;
            const double fd = (fp - fm) / (2 * h);
            worst = std::max(worst, std::fabs(fd - grad[z][i]) / std::max(std::fabs(grad[z][i]), 1e-2));
        }
    }
    return worst;
}

void criterion_adjoint_gradient() {
    double adj_real = 0.0;
    double adj_complex = 0.0;
    double grad_real = 0.0;
    double grad_complex = 0.0;
    double grad_tv = 0.0;
    double grad_ls = 0.0;
    for (std::size_t s = 1; s <= 3; ++s) {
        for (Padding padding : {Padding::None, Padding::Zero}) {
            std::vector<double> z;
            for (std::size_t i = 0; i < s; ++i) z.push_back(0.5e-3 + 0.375e-3 * static_cast<double>(i));
            auto c = optics(8, z);
            c.padding = padding;
            const HologramOperator op(c);
            const std::uint64_t seed = 100 * s + (padding == Padding::Zero ? 1 : 0);

            std::vector<RealGrid2D> f;
            std::vector<RealGrid2D> fi;
            for (std::size_t i = 0; i < s; ++i) {
                f.push_back(random_real(8, seed + i, -1, 1));
                fi.push_back(random_real(8, seed + 10 + i, -1, 1));
            }
            const auto y = random_real(8, seed + 20, -1, 1);
            const auto ar = op.adjoint_real(y);
            double rhs = 0.0;
            for (std::size_t i = 0; i < s; ++i) rhs += dot(f[i], ar[i]);
            adj_real = std::max(adj_real, rel(dot(op.apply(f), y), rhs));

            std::vector<ComplexGrid2D> fc;
            for (std::size_t i = 0; i < s; ++i) fc.push_back(to_complex(f[i], fi[i]));
            const auto ac = op.adjoint(y);
            double rhs_c = 0.0;
            for (std::size_t i = 0; i < s; ++i) rhs_c += dot(fc[i], ac[i]);
            adj_complex = std::max(adj_complex, rel(dot(op.apply(fc), y), rhs_c));

            // Poisson NLL gradients around a positive prediction.
            const auto g = random_real(8, seed + 30, 0.5, 1.5);
            std::vector<RealGrid2D> w;
            std::vector<RealGrid2D> wi;
            for (std::size_t i = 0; i < s; ++i) {
                auto v = random_real(8, seed + 40 + i, -0.05, 0.05);
                for (auto& p : v) p += 1.0 / static_cast<double>(s);
                w.push_back(v);
                wi.push_back(random_real(8, seed + 50 + i, -0.05, 0.05));
            }
            const double floor = 1e-12;
            const auto gr = nll_gradient_slices(g, predicted_intensity(op, w), op, floor);
            grad_real = std::max(grad_real, fd_error(w, [&] { return nll(g, predicted_intensity(op, w), floor); }, gr));

            auto joint = [&] {
                std::vector<ComplexGrid2D> v;
                for (std::size_t i = 0; i < s; ++i) v.push_back(to_complex(w[i], wi[i]));
                return v;
            };
            const auto gc = nll_gradient_slices_complex(g, predicted_intensity(op, joint()), op, floor);
            std::vector<RealGrid2D> gc_re;
            std::vector<RealGrid2D> gc_im;
            for (const auto& v : gc) {
                gc_re.push_back(real_part(v));
                gc_im.push_back(imag_part(v));
            }
            auto jf = [&] { return nll(g, predicted_intensity(op, joint()), floor); };
            grad_complex = std::max(grad_complex, fd_error(w, jf, gc_re));
            grad_complex = std::max(grad_complex, fd_error(wi, jf, gc_im));

            const auto gls = least_squares_gradient(g, f, op);
            auto ls = [&] {
                const auto r = op.apply(f);
                double acc = 0.0;
                for (std::size_t i = 0; i < r.size(); ++i) acc += 0.5 * (g[i] - r[i]) * (g[i] - r[i]);
                return acc;
            };
            grad_ls = std::max(grad_ls, fd_error(f, ls, gls));
        }
    }
    for (double eps : {1e-2, 1e-1, 1.0}) {
        std::vector<RealGrid2D> w{random_real(8, 900, -1, 1)};
        const std::vector<RealGrid2D> g{tv_gradient(w[0], eps)};
        grad_tv = std::max(grad_tv, fd_error(w, [&] { return tv_value_smoothed(w[0], eps); }, g));
    }
    const bool pass = adj_real < 1e-10 && adj_complex < 1e-10 && grad_real < 1e-4 && grad_complex < 1e-4 &&
                      grad_tv < 1e-4 && grad_ls < 1e-4;
    report(1, "adjoint identities and gradient finite differences (8x8, 1-3 slices, both paddings)", pass,
           {fmt("adjoint real %.2e, complex %.2e (limit 1e-10)", adj_real, adj_complex),
            fmt("gradient rel. error: NLL %.2e, complex joint %.2e, TV %.2e (limit 1e-4)", grad_real, grad_complex,
                grad_tv),
            fmt("least-squares gradient %.2e", grad_ls)});
}

void criterion_propagation() {
    const std::size_t n = 512;
    const Geometry g{n, n, kPitch, kPitch};
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> d(-1, 1);
    ComplexGrid2D x(g);
    for (auto& v : x) v = complex_t(d(gen), d(gen));
    const auto fwd = propagate(x, 1e-3, kLambda);
    const double round_trip = rel_distance(propagate(fwd, -1e-3, kLambda), x);
    const double energy = rel(norm2(fwd), norm2(x));
    double ks = 0.0;
    for (double z : {0.5e-3, 1e-3, 1.25e-3}) {
        const auto h = idft2(transfer_function(g, kLambda, z).spectrum);
        complex_t total = 0.0;
        for (const auto& v : h) total += v;
        const auto k = kernel_sums(kLambda, z);
        const double k0z = wavenumber(kLambda) * z;
        ks = std::max({ks, std::fabs(total.real() - k.re), std::fabs(total.imag() - k.im),
                       std::fabs(std::cos(k0z) - k.re), std::fabs(std::sin(k0z) - k.im)});
    }
    report(2, "propagation round trip, energy conservation, kernel sums (512x512)",
           round_trip < 1e-10 && energy < 1e-10 && ks < 1e-10,
           {fmt("round trip %.2e, energy %.2e, kernel sums %.2e (limit 1e-10)", round_trip, energy, ks)});
}

struct DepthResult {
    std::vector<double> em_ssim;
    std::vector<double> bp_ssim;
    std::vector<double> crosstalk;
    double seconds = 0.0;
};

// Energy of a slice estimate on the other slices' supports over the energy on its own support.
double crosstalk(const RealGrid2D& estimate, std::size_t slice, const std::vector<RealGrid2D>& supports) {
    double own = 0.0;
    double other = 0.0;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        const double e = estimate[i] * estimate[i];
        if (supports[slice][i] > 0.0) {
            own += e;
            continue;
        }
        for (std::size_t z = 0; z < supports.size(); ++z) {
            if (z != slice && supports[z][i] > 0.0) {
                other += e;
                break;
            }
        }
    }
    return other / own;
}

DepthResult run_depth_scene(std::size_t n) {
    const auto c = optics(n, {0.5e-3, 1e-3, 1.25e-3});
    const auto truth = phantoms::multi_depth(c.geometry(), 3, 0.1);
    const auto g = synthesize_linear(truth, c);
    const HologramOperator op(c);
    ReconParams p;
    p.max_iters = 100;
    p.beta = 0.5;
    p.upper_bound = apply_reference_illumination(RealGrid2D(c.geometry(), 1.0));
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = reconstruct_real(g, c, p);
    DepthResult out;
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto bp = backpropagate(g, op);
    std::vector<RealGrid2D> supports;
    for (const auto& t : truth.real_parts()) supports.push_back(phantoms::support(t));
    for (std::size_t z = 0; z < 3; ++z) {
        const auto truth_z = real_part(truth[z]);
        const auto em = real_part(object_from_scaled(r.estimate[z], z, op));
        ComplexGrid2D bp_scaled = bp[z];
        for (auto& v : bp_scaled) v = complex_t(v.real() / 3.0, 0.0);
        const auto bpo = real_part(object_from_scaled(bp_scaled, z, op));
        out.em_ssim.push_back(ssim(truth_z, em));
        out.bp_ssim.push_back(ssim(truth_z, bpo));
        out.crosstalk.push_back(crosstalk(em, z, supports));
    }
    return out;
}

void criterion_depth() {
    bool pass = true;
    std::vector<std::string> details;
    for (std::size_t n : {128u, 512u}) {
        const auto r = run_depth_scene(n);
        for (std::size_t z = 0; z < 3; ++z) {
            pass = pass && r.em_ssim[z] > r.bp_ssim[z] && r.crosstalk[z] < 0.1;
            char buf[256];
            std::snprintf(buf, sizeof buf, "%zux%zu slice %zu: SSIM EM %.3f vs backprop %.3f, crosstalk %.4f", n, n,
                          z, r.em_ssim[z], r.bp_ssim[z], r.crosstalk[z]);
            details.emplace_back(buf);
        }
        details.push_back(fmt("%.0fx%.0f reconstruction time %.1f s (100 iterations)", double(n), double(n), r.seconds));
    }
    report(3, "three-depth sparse scene: EM beats backprop on every slice, crosstalk < 10%", pass, details);
}

void criterion_convergence() {
    const std::size_t n = 512;
    const auto c = optics(n, {1e-3});
    const auto truth = phantoms::multi_depth(c.geometry(), 1, 0.1);
    const auto g = synthesize_linear(truth, c);
    const QualityReference ref{truth.slices()};

    ReconParams p;
    p.max_iters = 100;
    p.beta = 0.5;
    p.upper_bound = apply_reference_illumination(RealGrid2D(c.geometry(), 1.0));
    const auto ub = ssim_curve(reconstruct_real(g, c, p, &ref).trace);
    double plateau = 0.0;
    for (std::size_t i = ub.size() - 10; i < ub.size(); ++i) plateau += ub[i] / 10.0;
    const int k95 = sustained_crossing(ub, 0.95 * plateau);
    const bool pass_a = k95 > 0 && k95 <= 15;

    ReconParams q;
    q.max_iters = 100;
    const auto em = ssim_curve(reconstruct_real(g, c, q, &ref).trace);
    BaselineParams b;
    b.max_iters = 100;
    const auto base = ssim_curve(baseline_reconstruct(g, c, b, &ref).trace);
    const double target = base.back();
    const int k_base = sustained_crossing(base, target);
    const int k_em = sustained_crossing(em, target);
    const bool pass_b = k_em > 0 && k_em + 30 <= k_base;

    std::vector<std::string> details{
        fmt("with upper bound: plateau SSIM %.4f, stays above 95%% from iteration %.0f (limit 15)", plateau, k95),
        fmt("SSIM at iterations 10/15/20: %.4f / %.4f / %.4f", ub[9], ub[14], ub[19]),
        fmt("without bound: baseline 100-iteration SSIM %.4f, reached by baseline at %.0f, by EM at %.0f", target,
            k_base, k_em),
        fmt("EM without bound final SSIM %.4f (0 = never settles above the target)", em.back())};
    report(4, "convergence speed on the weak-scattering phantom (512x512)", pass_a && pass_b, details);
}

void criterion_poisson() {
    const std::size_t n = 512;
    const auto c = optics(n, {1e-3});
    const auto truth = phantoms::multi_depth(c.geometry(), 1, 0.1);
    const auto clean = synthesize_linear(truth, c);
    const double scale = photon_scale_for_mean_counts(clean, 1e4);
    const auto g = add_poisson_noise(clean, scale, 7);
    const auto reference = add_poisson_noise(RealGrid2D(c.geometry(), 1.0), scale, 8);
    const HologramOperator op(c);
    const auto truth_re = real_part(truth[0]);
    const double peak = max_value(abs(truth[0]));

    auto object_psnr = [&](const ReconResult& r) {
        return psnr(real_part(object_from_scaled(r.estimate[0], 0, op)), truth_re, peak);
    };

    ReconParams p;
    p.max_iters = 100;
    p.upper_bound = apply_reference_illumination(reference);
    const double em_ub = object_psnr(reconstruct_real(g, c, p));
    ReconParams q;
    q.max_iters = 100;
    const double em_plain = object_psnr(reconstruct_real(g, c, q));
    BaselineParams b;
    b.max_iters = 100;
    const double base = object_psnr(baseline_reconstruct(g, c, b));

    const double pair1 = psnr_from_mse(372.95, 255.0);
    const double pair2 = psnr_from_mse(315.40, 255.0);
    const bool pairs = std::fabs(pair1 - 22.41) < 0.01 && std::fabs(pair2 - 23.14) < 0.01;
    report(5, "Poisson-corrupted single slice: EM PSNR above baseline; published PSNR/MSE pairs", em_ub > base && pairs,
           {fmt("PSNR (dB, peak = object peak): EM with reference bound %.2f, baseline %.2f", em_ub, base),
            fmt("EM without bound %.2f (not part of the criterion)", em_plain),
            fmt("mean counts 1e4 (photon scale %.1f), noise seed 7, reference seed 8", scale),
            fmt("psnr_from_mse: 372.95 -> %.3f dB, 315.40 -> %.3f dB", pair1, pair2)});
}

void criterion_complex() {
    const std::size_t n = 128;
    const auto c = optics(n, {1e-3});
    const HologramOperator op(c);
    ReconParams p;
    p.max_iters = 200;

    const auto obj = phantoms::complex_object(c.geometry(), 0.1, 0.1);
    const auto r = reconstruct_complex(synthesize_linear(obj, c), c, p);
    const auto o = object_from_scaled(r.estimate[0], 0, op);
    const double ncc_re = ncc(real_part(o), real_part(obj[0]));
    const double ncc_im = ncc(imag_part(o), imag_part(obj[0]));

    const auto real_obj = phantoms::multi_depth(c.geometry(), 1, 0.1);
    const auto rr = reconstruct_complex(synthesize_linear(real_obj, c), c, p);
    const double ratio = norm2(imag_part(rr.estimate[0])) / norm2(real_part(rr.estimate[0]));
    const auto ro = object_from_scaled(rr.estimate[0], 0, op);
    const double object_ratio = norm2(imag_part(ro)) / norm2(real_part(ro));

    report(6, "complex object: NCC > 0.8 for both parts; real object keeps |f_im| < 5% of |f_re|",
           ncc_re > 0.8 && ncc_im > 0.8 && ratio < 0.05,
           {fmt("128x128, 200 iterations: NCC real %.3f, imaginary %.3f", ncc_re, ncc_im),
            fmt("real object: |f_im| / |f_re| = %.4f for the scaled estimate", ratio),
            fmt("same run without the folded DC: |o_im| / |o_re| = %.3f (informational)", object_ratio)});
}

void criterion_autofocus() {
    const std::size_t n = 512;
    const auto c = optics(n, {1e-3});
    const auto g = synthesize_linear(phantoms::multi_depth(c.geometry(), 1, 0.1), c);
    const auto r = autofocus(g, c, 0.5e-3, 1.5e-3, 10e-6);
    report(7, "autofocus recovers z = 1.0 mm within 10 um over 0.5-1.5 mm",
           std::fabs(r.z - 1e-3) <= 10e-6 + 1e-12 && !r.low_confidence,
           {fmt("512x512: focus at %.4f mm (%.0f candidates)", r.z * 1e3, double(r.candidates.size()))});
}

void criterion_resolution() {
    const double na = kLambda / (2 * 1.17e-6);
    const auto r = resolution_limits(kLambda, na);
    const auto r2 = resolution_limits(kLambda, 2 * na);
    const auto r3 = resolution_limits(kLambda, 3 * na / 4);
    const bool lateral_ok = std::fabs(r.lateral - 1.17e-6) <= 0.01 * 1.17e-6;
    const double s1 = rel(r2.lateral, r.lateral / 2);
    const double s2 = rel(r2.axial, r.axial / 4);
    const double s3 = rel(r3.lateral, r.lateral * 4 / 3);
    const double s4 = rel(r3.axial, r.axial * 16 / 9);
    const double scaling = std::max({s1, s2, s3, s4});
    report(8, "resolution limits: lateral 1.17 um within 1%, exact 1/NA and 1/NA^2 scaling",
           lateral_ok && scaling < 1e-15,
           {fmt("NA %.5f: lateral %.4f um, axial %.3f um", na, r.lateral * 1e6, r.axial * 1e6),
            fmt("axial differs from the published 16.4 um by %.2f%% (informational)",
                100 * std::fabs(r.axial - 16.4e-6) / 16.4e-6),
            fmt("scaling law deviation %.1e (round-off only)", scaling)});
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

// Manifest text without the output directory line, which differs between the two runs by design.
std::string manifest_body(const fs::path& dir) {
    std::istringstream is(slurp(dir / "manifest.txt"));
    std::string line;
    std::string out;
    while (std::getline(is, line)) {
        if (!line.starts_with("output_dir")) out += line + "\n";
    }
    return out;
}

void criterion_determinism() {
    const fs::path root = fs::temp_directory_path() / "emholo_acceptance_determinism";
    fs::remove_all(root);
    const std::string sim_text =
        "mode = simulate\nwidth = 128\nheight = 128\nslice_distances = 0.5mm, 1mm, 1.25mm\nnoise = true\n"
        "photon_counts = 1e4\nseed = 2024\n";

    auto run_pair = [&](const std::string& tag, const std::string& text, int threads) {
        auto c = RunConfig::from_document(KeyValueDocument::parse(text));
        c.output_dir = root / tag;
#ifdef _OPENMP
        const int saved = omp_get_max_threads();
        if (threads > 0) omp_set_num_threads(threads);
#endif
        const auto r = run(c);
#ifdef _OPENMP
        omp_set_num_threads(saved);
#endif
        (void)threads;
        return r;
    };

    std::vector<std::string> details;
    bool pass = true;
    std::size_t compared = 0;
    const std::vector<std::string> recon_modes = {"reconstruct-real", "baseline"};
    for (int pass_index = 0; pass_index < 2; ++pass_index) {
        const std::string suffix = pass_index == 0 ? "a" : "b";
        const int threads = pass_index == 0 ? 0 : 1;
        const auto sim = run_pair("sim_" + suffix, sim_text, threads);
        pass = pass && sim.exit_code == 0;
        const fs::path holo = root / ("sim_" + suffix) / "hologram.pfm";
        for (const auto& mode : recon_modes) {
            std::string text = "mode = " + mode + "\nslice_distances = 0.5mm, 1mm, 1.25mm\nmax_iters = 20\n";
            text += "hologram = " + holo.string() + "\n";
            for (int z = 0; z < 3; ++z) {
                text += (z == 0 ? "ground_truth = " : ", ") +
                        (root / ("sim_" + suffix) / ("slice" + std::to_string(z) + "_truth_re.pfm")).string();
            }
            text += "\n";
            const auto r = run_pair(mode + "_" + suffix, text, threads);
            pass = pass && r.exit_code == 0;
        }
    }
    for (const std::string tag : {"sim", "reconstruct-real", "baseline"}) {
        const fs::path a = root / (tag + "_a");
        const fs::path b = root / (tag + "_b");
        for (const auto& entry : fs::directory_iterator(a)) {
            const auto name = entry.path().filename();
            if (name == "manifest.txt") continue;
            ++compared;
            if (slurp(a / name) != slurp(b / name)) {
                pass = false;
                details.push_back(tag + "/" + name.string() + " differs");
            }
        }
        std::string ma = manifest_body(a);
        std::string mb = manifest_body(b);
        // Reconstruction manifests name their own input hologram, which lives in a per-run directory.
        const auto strip = [&](std::string s, const std::string& from) {
            for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from)) s.erase(pos, from.size());
            return s;
        };
        ma = strip(ma, (root / "sim_a").string());
        mb = strip(mb, (root / "sim_b").string());
        if (ma != mb) {
            pass = false;
            details.push_back(tag + "/manifest.txt differs beyond its paths");
        }
    }
    details.insert(details.begin(), fmt("%.0f output files compared byte for byte across two runs (default threads vs 1)",
                                        double(compared)));
    report(9, "determinism: identical manifests give bit-identical holograms, reconstructions and traces", pass,
           details);
    fs::remove_all(root);
}

} // namespace

int main() {
    set_warning_sink([](std::string_view) {});
    const auto start = std::chrono::steady_clock::now();
    criterion_adjoint_gradient();
    criterion_propagation();
    criterion_depth();
    criterion_convergence();
    criterion_poisson();
    criterion_complex();
    criterion_autofocus();
    criterion_resolution();
    criterion_determinism();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d of 9 criteria failed (%.0f s)\n", failures, seconds);
    return failures == 0 ? 0 : 1;
}
