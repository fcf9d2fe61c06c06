#include "cusplab/kernels.hpp"

#include "cusplab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cusplab {

double FieldScan::max_sup_c0() const {
    double m = 0.0;
    for (const auto& l : level) m = std::max(m, l.sup_c0);
    return m;
}
double FieldScan::max_sup_c1() const {
    double m = 0.0;
    for (const auto& l : level) m = std::max(m, l.sup_c1);
    return m;
}
double FieldScan::max_sup_c2() const {
    double m = 0.0;
    for (const auto& l : level) m = std::max(m, l.sup_c2);
    return m;
}

int eval_grid_size(int K) { return std::max(4, 4 * K + 2); }

namespace {

// Shared mode tables for one scan.
struct ModeTables {
    std::size_t nmodes;
    int side; // 2K+1
    std::vector<double> dx, dy; // Euclidean dual components per mode
    std::vector<cxd> E;         // M x side evaluation matrix, row-major
    int M;

    ModeTables(const TensorField& h) {
        const int K = h.K();
        side = 2 * K + 1;
        nmodes = h.mode_count();
        dx.resize(nmodes);
        dy.resize(nmodes);
        for (std::size_t m = 0; m < nmodes; ++m) {
            const auto [k1, k2] = h.mode_of(m);
            const auto d = h.torus().dual_vector(k1, k2);
            dx[m] = d[0];
            dy[m] = d[1];
        }
        M = eval_grid_size(K);
        E.resize(static_cast<std::size_t>(M) * static_cast<std::size_t>(side));
        for (int a = 0; a < M; ++a) {
            for (int p = 0; p < side; ++p) {
                const double phase =
                    2.0 * std::numbers::pi * static_cast<double>((p - K) * a) / static_cast<double>(M);
                E[static_cast<std::size_t>(a) * static_cast<std::size_t>(side) +
                  static_cast<std::size_t>(p)] = cxd(std::cos(phase), std::sin(phase));
            }
        }
    }
};

// The ten derivative layers of one component at one node, as mode matrices.
enum Layer { LV = 0, LX, LY, LR, LXX, LXY, LYY, LXR, LYR, LRR, kLayers };

struct NodeScratch {
    std::vector<cxd> coef;  // kLayers * side * side
    std::vector<cxd> tmp;   // M * side
    std::vector<double> outr; // kLayers * M * M
    std::vector<double> n0, n1, n2; // M * M accumulators
};

// Separable evaluation of one coefficient matrix onto the M x M grid.
void transform_layer(const ModeTables& T, const cxd* C, std::vector<cxd>& tmp, double* out) {
    const int S = T.side, M = T.M;
    // tmp[a][q] = sum_p E[a][p] C[p][q]
    for (int a = 0; a < M; ++a) {
        const cxd* Erow = &T.E[static_cast<std::size_t>(a) * static_cast<std::size_t>(S)];
        cxd* trow = &tmp[static_cast<std::size_t>(a) * static_cast<std::size_t>(S)];
        for (int q = 0; q < S; ++q) trow[q] = cxd(0.0, 0.0);
        for (int p = 0; p < S; ++p) {
            const cxd e = Erow[p];
            const cxd* Crow = C + static_cast<std::size_t>(p) * static_cast<std::size_t>(S);
            for (int q = 0; q < S; ++q) trow[q] += e * Crow[q];
        }
    }
    // out[a][b] = Re sum_q tmp[a][q] E[b][q]
    for (int a = 0; a < M; ++a) {
        const cxd* trow = &tmp[static_cast<std::size_t>(a) * static_cast<std::size_t>(S)];
        double* orow = out + static_cast<std::size_t>(a) * static_cast<std::size_t>(M);
        for (int b = 0; b < M; ++b) {
            const cxd* Erow = &T.E[static_cast<std::size_t>(b) * static_cast<std::size_t>(S)];
            double acc = 0.0;
            for (int q = 0; q < S; ++q) {
                const cxd z = trow[q] * Erow[q];
                acc += z.real();
            }
            orow[b] = acc;
        }
    }
}

LevelScan scan_one_node(const TensorField& h, const ModeTables& T, std::size_t i,
                        NodeScratch& scratch) {
    const int S = T.side, M = T.M;
    const std::size_t SS = static_cast<std::size_t>(S) * static_cast<std::size_t>(S);
    const std::size_t MM = static_cast<std::size_t>(M) * static_cast<std::size_t>(M);
    scratch.coef.assign(kLayers * SS, cxd(0.0, 0.0));
    scratch.tmp.assign(static_cast<std::size_t>(M) * static_cast<std::size_t>(S), cxd(0.0, 0.0));
    scratch.outr.assign(kLayers * MM, 0.0);
    scratch.n0.assign(MM, 0.0);
    scratch.n1.assign(MM, 0.0);
    scratch.n2.assign(MM, 0.0);

    const double r = h.grid().r(i);
    LevelScan out;
    for (int c = 0; c < 6; ++c) {
        cxd* C = scratch.coef.data();
        // base, radial derivative and second radial derivative coefficients
        for (std::size_t m = 0; m < T.nmodes; ++m) {
            const auto prof = h.profile(c, m);
            const cxd v = prof[i];
            const cxd v1 = h.grid().d1_at(prof, i);
            const cxd v2 = h.grid().d2_at(prof, i);
            const cxd jx = cxd(0.0, T.dx[m]);
            const cxd jy = cxd(0.0, T.dy[m]);
            C[LV * SS + m] = v;
            C[LR * SS + m] = v1;
            C[LRR * SS + m] = v2;
            C[LX * SS + m] = jx * v;
            C[LY * SS + m] = jy * v;
            C[LXX * SS + m] = -T.dx[m] * T.dx[m] * v;
            C[LXY * SS + m] = -T.dx[m] * T.dy[m] * v;
            C[LYY * SS + m] = -T.dy[m] * T.dy[m] * v;
            C[LXR * SS + m] = jx * v1;
            C[LYR * SS + m] = jy * v1;
        }
        for (int l = 0; l < kLayers; ++l)
            transform_layer(T, C + static_cast<std::size_t>(l) * SS, scratch.tmp,
                            scratch.outr.data() + static_cast<std::size_t>(l) * MM);

        const double w = comp_frame_exponent[c];
        const double mult = comp_multiplicity[c];
        const double ew = std::exp(w * r);
        const double e1 = std::exp((w + 1.0) * r);
        const double e2 = std::exp((w + 2.0) * r);
        const double* L = scratch.outr.data();
        for (std::size_t p = 0; p < MM; ++p) {
            const double V = L[LV * MM + p];
            const double Vx = L[LX * MM + p], Vy = L[LY * MM + p], Vr = L[LR * MM + p];
            const double Vxx = L[LXX * MM + p], Vxy = L[LXY * MM + p], Vyy = L[LYY * MM + p];
            const double Vxr = L[LXR * MM + p], Vyr = L[LYR * MM + p], Vrr = L[LRR * MM + p];
            const double val = ew * V;
            scratch.n0[p] += mult * val * val;
            const double gx = e1 * Vx, gy = e1 * Vy;
            const double gr = ew * (Vr + w * V);
            scratch.n1[p] += mult * (gx * gx + gy * gy + gr * gr);
            const double hxx = e2 * Vxx, hxy = e2 * Vxy, hyy = e2 * Vyy;
            const double hxr = e1 * (Vxr + w * Vx), hyr = e1 * (Vyr + w * Vy);
            const double hrr = ew * (Vrr + 2.0 * w * Vr + w * w * V);
            scratch.n2[p] += mult * (hxx * hxx + 2.0 * hxy * hxy + hyy * hyy +
                                     2.0 * hxr * hxr + 2.0 * hyr * hyr + hrr * hrr);
        }
    }

    const double cell = h.level_area(i) / static_cast<double>(MM);
    double i0 = 0.0, i1 = 0.0, i2 = 0.0, ic2 = 0.0;
    for (std::size_t p = 0; p < MM; ++p) {
        const double a0 = std::sqrt(scratch.n0[p]);
        const double a1 = std::sqrt(scratch.n1[p]);
        const double a2 = std::sqrt(scratch.n2[p]);
        const double c1 = a0 + a1;
        const double c2 = a0 + a1 + a2;
        out.sup_c0 = std::max(out.sup_c0, a0);
        out.sup_c1 = std::max(out.sup_c1, c1);
        out.sup_c2 = std::max(out.sup_c2, c2);
        i0 += a0 * a0;
        i1 += c1 * c1;
        i2 += c2 * c2;
        ic2 += c2;
    }
    out.int_c0_sq = cell * i0;
    out.int_c1_sq = cell * i1;
    out.int_c2_sq = cell * i2;
    out.int_c2 = cell * ic2;
    return out;
}

} // namespace

FieldScan scan_field(const TensorField& h) {
    const ModeTables T(h);
    FieldScan scan;
    scan.level.resize(h.nodes());
    parallel_for(h.nodes(), [&](std::size_t i) {
        NodeScratch scratch;
        scan.level[i] = scan_one_node(h, T, i, scratch);
    });
    return scan;
}

LevelScan scan_level(const TensorField& h, std::size_t node) {
    const ModeTables T(h);
    NodeScratch scratch;
    return scan_one_node(h, T, node, scratch);
}

FieldScan scan_field_reference(const TensorField& h) {
    const ModeTables T(h);
    const int M = T.M;
    const std::size_t MM = static_cast<std::size_t>(M) * static_cast<std::size_t>(M);
    FieldScan scan;
    scan.level.resize(h.nodes());
    std::vector<double> n0(MM), n1(MM), n2(MM);
    for (std::size_t i = 0; i < h.nodes(); ++i) {
        const double r = h.grid().r(i);
        std::fill(n0.begin(), n0.end(), 0.0);
        std::fill(n1.begin(), n1.end(), 0.0);
        std::fill(n2.begin(), n2.end(), 0.0);
        for (int c = 0; c < 6; ++c) {
            const double w = comp_frame_exponent[c];
            const double mult = comp_multiplicity[c];
            const double ew = std::exp(w * r);
            const double e1 = std::exp((w + 1.0) * r);
            const double e2 = std::exp((w + 2.0) * r);
            for (int a = 0; a < M; ++a) {
                for (int b = 0; b < M; ++b) {
                    cxd V = 0, Vx = 0, Vy = 0, Vr = 0;
                    cxd Vxx = 0, Vxy = 0, Vyy = 0, Vxr = 0, Vyr = 0, Vrr = 0;
                    for (std::size_t m = 0; m < T.nmodes; ++m) {
                        const auto [k1, k2] = h.mode_of(m);
                        const double phase = 2.0 * std::numbers::pi *
                                             (k1 * static_cast<double>(a) + k2 * static_cast<double>(b)) /
                                             static_cast<double>(M);
                        const cxd e(std::cos(phase), std::sin(phase));
                        const auto prof = h.profile(c, m);
                        const cxd v = prof[i] * e;
                        const cxd v1 = h.grid().d1_at(prof, i) * e;
                        const cxd v2 = h.grid().d2_at(prof, i) * e;
                        const cxd jx(0.0, T.dx[m]);
                        const cxd jy(0.0, T.dy[m]);
                        V += v;
                        Vx += jx * v;
                        Vy += jy * v;
                        Vr += v1;
                        Vxx += -T.dx[m] * T.dx[m] * v;
                        Vxy += -T.dx[m] * T.dy[m] * v;
                        Vyy += -T.dy[m] * T.dy[m] * v;
                        Vxr += jx * v1;
                        Vyr += jy * v1;
                        Vrr += v2;
                    }
                    const std::size_t p = static_cast<std::size_t>(a) * static_cast<std::size_t>(M) +
                                          static_cast<std::size_t>(b);
                    const double val = ew * V.real();
                    n0[p] += mult * val * val;
                    const double gx = e1 * Vx.real(), gy = e1 * Vy.real();
                    const double gr = ew * (Vr.real() + w * V.real());
                    n1[p] += mult * (gx * gx + gy * gy + gr * gr);
                    const double hxx = e2 * Vxx.real(), hxy = e2 * Vxy.real(), hyy = e2 * Vyy.real();
                    const double hxr = e1 * (Vxr.real() + w * Vx.real());
                    const double hyr = e1 * (Vyr.real() + w * Vy.real());
                    const double hrr = ew * (Vrr.real() + 2.0 * w * Vr.real() + w * w * V.real());
                    n2[p] += mult * (hxx * hxx + 2.0 * hxy * hxy + hyy * hyy + 2.0 * hxr * hxr +
                                     2.0 * hyr * hyr + hrr * hrr);
                }
            }
        }
        LevelScan& out = scan.level[i];
        const double cell = h.level_area(i) / static_cast<double>(MM);
        double i0 = 0.0, i1 = 0.0, i2 = 0.0, ic2 = 0.0;
        for (std::size_t p = 0; p < MM; ++p) {
            const double a0 = std::sqrt(n0[p]);
            const double a1 = std::sqrt(n1[p]);
            const double a2 = std::sqrt(n2[p]);
            out.sup_c0 = std::max(out.sup_c0, a0);
            out.sup_c1 = std::max(out.sup_c1, a0 + a1);
            out.sup_c2 = std::max(out.sup_c2, a0 + a1 + a2);
            i0 += a0 * a0;
            i1 += (a0 + a1) * (a0 + a1);
            i2 += (a0 + a1 + a2) * (a0 + a1 + a2);
            ic2 += a0 + a1 + a2;
        }
        out.int_c0_sq = cell * i0;
        out.int_c1_sq = cell * i1;
        out.int_c2_sq = cell * i2;
        out.int_c2 = cell * ic2;
    }
    return scan;
}

} // namespace cusplab
