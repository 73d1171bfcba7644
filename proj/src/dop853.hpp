#pragma once

// Dormand-Prince 8(5,3) embedded pair (Hairer, Norsett & Wanner) with a
// seventh-order continuous extension that reuses the FSAL stage instead of
// three extra stages.

#include <array>
#include <algorithm>
#include <cmath>
#include <limits>

namespace radneumann::detail {

using Vec2 = std::array<double, 2>;

struct Dop853Step {
    Vec2 y_new;
    Vec2 f_new;
    std::array<std::array<double, 8>, 2> cont;
    double err;  // scaled error norm, <= 1 means acceptable; NaN if the trial blew up
};

inline double dense_eval(const std::array<double, 8>& c, double theta)
{
    const double t1 = 1.0 - theta;
    return c[0] +
           theta * (c[1] +
                    t1 * (c[2] + theta * (c[3] + t1 * (c[4] + theta * (c[5] + t1 * (c[6] + theta * c[7]))))));
}

namespace dop853 {
inline constexpr double
    c2 = 0.05260015195876773187856, c3 = 0.07890022793815159781784,
    c4 = 0.11835034190722739672676, c5 = 0.28164965809277260327324,
    c6 = 0.33333333333333333333333, c7 = 0.25000000000000000000000,
    c8 = 0.30769230769230769230769, c9 = 0.65128205128205128205128,
    c10 = 0.60000000000000000000000, c11 = 0.85714285714285714285714,
    a21 = 0.05260015195876773187856,
    a31 = 0.01972505698453789945446, a32 = 0.05917517095361369836338,
    a41 = 0.02958758547680684918169, a43 = 0.08876275643042054754507,
    a51 = 0.24136513415926668550237, a53 = -0.88454947932828608534486,
    a54 = 0.92483400326179200311574,
    a61 = 0.03703703703703703703704, a64 = 0.17082860872947387127960,
    a65 = 0.12546768756682242501669,
    a71 = 0.03710937500000000000000, a74 = 0.17025221101954403931498,
    a75 = 0.06021653898045596068502, a76 = -0.01757812500000000000000,
    a81 = 0.03709200011850479271088, a84 = 0.17038392571223999381021,
    a85 = 0.10726203044637328465181, a86 = -0.01531943774862440175279,
    a87 = 0.00827378916381402288758,
    a91 = 0.62411095871607571711443, a94 = -3.36089262944694129406857,
    a95 = -0.86821934684172600681819, a96 = 27.5920996994467083049416,
    a97 = 20.1540675504778934086187, a98 = -43.4898841810699588477366,
    a101 = 0.47766253643826436589043, a104 = -2.48811461997166764192642,
    a105 = -0.59029082683684299637145, a106 = 21.2300514481811942347289,
    a107 = 15.2792336328824235832597, a108 = -33.2882109689848629194453,
    a109 = -0.02033120170850862613582,
    a111 = -0.93714243008598732571704, a114 = 5.18637242884406370830024,
    a115 = 1.09143734899672957818500, a116 = -8.14978701074692612513997,
    a117 = -18.5200656599969598641566, a118 = 22.7394870993505042818970,
    a119 = 2.49360555267965238987089, a1110 = -3.04676447189821950038237,
    a121 = 2.27331014751653820792360, a124 = -10.5344954667372501984067,
    a125 = -2.00087205822486249909676, a126 = -17.9589318631187989172766,
    a127 = 27.9488845294199600508500, a128 = -2.85899827713502369474066,
    a129 = -8.87285693353062954433549, a1210 = 12.3605671757943030647266,
    a1211 = 0.64339274601576353035597,
    b1 = 0.05429373411656876223805, b6 = 4.45031289275240888144114,
    b7 = 1.89151789931450038304282, b8 = -5.80120396001058478146721,
    b9 = 0.31116436695781989440892, b10 = -0.15216094966251607855618,
    b11 = 0.20136540080403034837478, b12 = 0.04471061572777259051769,
    bhh1 = 0.24409448818897637795276, bhh2 = 0.73384668828161185734136,
    bhh3 = 0.02205882352941176470588,
    er1 = 0.01312004499419488073250, er6 = -1.22515644637620444072057,
    er7 = -0.49575894965725019152141, er8 = 1.66437718245498653696153,
    er9 = -0.35032884874997368168865, er10 = 0.33417911871301747902973,
    er11 = 0.08192320648511571246571, er12 = -0.02235530786388629525884,
    d41 = -5.40685903845352664250302, d46 = 367.268892700041893590281,
    d47 = 154.609958204083905482676, d48 = -505.920283865412564024766,
    d49 = 15.5975154819608130688200, d410 = -26.1936204184402805956691,
    d411 = -0.74003512364122230844721, d412 = 1.11776539319431476294221,
    d413 = -0.33333333333333333333333,
    d51 = 6.51987095363079615048119, d56 = -1066.34956011730205278592,
    d57 = -351.864047514639508625601, d58 = 1363.51955696662884408368,
    d59 = -112.727669432657582669864, d510 = 159.796191868560289612921,
    d511 = -2.13865100308788816220259, d512 = -3.75569172113289760348584,
    d513 = 7.00000000000000000000000,
    d61 = 10.4698004763293477204238, d66 = -1380.01473607038123167155,
    d67 = -531.219827862514074379012, d68 = 1866.98964341870892451324,
    d69 = -53.3302605020547902574560, d610 = 82.4147560258671369782481,
    d611 = 7.38443654502992069572676, d612 = 0.41729908012587751149843,
    d613 = -3.11111111111111111111111,
    d71 = -16.6338582677165354330709, d76 = 4516.16568914956011730205,
    d77 = 1393.85185384057776465219, d78 = -5687.52042419481539670071,
    d79 = 473.965563750151263163661, d710 = -661.810776942355889724311,
    d711 = -18.0180473354013232598119;
}  // namespace dop853

/// One trial step of size h from (x, y), f0 = f(x, y).
/// `rhs` has signature Vec2(double x, const Vec2& y).
template <class Rhs>
Dop853Step dop853_trial(const Rhs& rhs, double x, const Vec2& y, const Vec2& f0, double h,
                        double atol, double rtol)
{
    using namespace dop853;
    Vec2 k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12, yt;
    const Vec2& k1 = f0;

    auto stage = [&](auto&& combine) {
        for (int i = 0; i < 2; ++i)
            yt[i] = y[i] + h * combine(i);
    };

    stage([&](int i) { return a21 * k1[i]; });
    k2 = rhs(x + c2 * h, yt);
    stage([&](int i) { return a31 * k1[i] + a32 * k2[i]; });
    k3 = rhs(x + c3 * h, yt);
    stage([&](int i) { return a41 * k1[i] + a43 * k3[i]; });
    k4 = rhs(x + c4 * h, yt);
    stage([&](int i) { return a51 * k1[i] + a53 * k3[i] + a54 * k4[i]; });
    k5 = rhs(x + c5 * h, yt);
    stage([&](int i) { return a61 * k1[i] + a64 * k4[i] + a65 * k5[i]; });
    k6 = rhs(x + c6 * h, yt);
    stage([&](int i) { return a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]; });
    k7 = rhs(x + c7 * h, yt);
    stage([&](int i) {
        return a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i];
    });
    k8 = rhs(x + c8 * h, yt);
    stage([&](int i) {
        return a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] + a97 * k7[i] + a98 * k8[i];
    });
    k9 = rhs(x + c9 * h, yt);
    stage([&](int i) {
        return a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] + a107 * k7[i] +
               a108 * k8[i] + a109 * k9[i];
    });
    k10 = rhs(x + c10 * h, yt);
    stage([&](int i) {
        return a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] + a117 * k7[i] +
               a118 * k8[i] + a119 * k9[i] + a1110 * k10[i];
    });
    k11 = rhs(x + c11 * h, yt);
    stage([&](int i) {
        return a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] + a127 * k7[i] +
               a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] + a1211 * k11[i];
    });
    k12 = rhs(x + h, yt);

    Dop853Step out;
    Vec2 incr;
    for (int i = 0; i < 2; ++i) {
        incr[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] +
                  b10 * k10[i] + b11 * k11[i] + b12 * k12[i];
        out.y_new[i] = y[i] + h * incr[i];
    }

    double err5 = 0.0, err3 = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double sk = atol + rtol * std::max(std::abs(y[i]), std::abs(out.y_new[i]));
        const double e3 = (incr[i] - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k12[i]) / sk;
        const double e5 = (er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] + er9 * k9[i] +
                           er10 * k10[i] + er11 * k11[i] + er12 * k12[i]) / sk;
        err3 += e3 * e3;
        err5 += e5 * e5;
    }
    double deno = err5 + 0.01 * err3;
    if (deno <= 0.0)
        deno = 1.0;
    out.err = std::abs(h) * err5 / std::sqrt(2.0 * deno);
    if (!std::isfinite(out.err) || !std::isfinite(out.y_new[0]) || !std::isfinite(out.y_new[1])) {
        out.err = std::numeric_limits<double>::quiet_NaN();
        return out;
    }

    out.f_new = rhs(x + h, out.y_new);
    const Vec2& k13 = out.f_new;
    for (int i = 0; i < 2; ++i) {
        auto& c = out.cont[i];
        const double yd = out.y_new[i] - y[i];
        const double yc = h * k1[i] - yd;
        c[0] = y[i];
        c[1] = yd;
        c[2] = yc;
        c[3] = yd - h * k13[i] - yc;
        c[4] = h * (d41 * k1[i] + d46 * k6[i] + d47 * k7[i] + d48 * k8[i] + d49 * k9[i] +
                    d410 * k10[i] + d411 * k11[i] + d412 * k12[i] + d413 * k13[i]);
        c[5] = h * (d51 * k1[i] + d56 * k6[i] + d57 * k7[i] + d58 * k8[i] + d59 * k9[i] +
                    d510 * k10[i] + d511 * k11[i] + d512 * k12[i] + d513 * k13[i]);
        c[6] = h * (d61 * k1[i] + d66 * k6[i] + d67 * k7[i] + d68 * k8[i] + d69 * k9[i] +
                    d610 * k10[i] + d611 * k11[i] + d612 * k12[i] + d613 * k13[i]);
        c[7] = h * (d71 * k1[i] + d76 * k6[i] + d77 * k7[i] + d78 * k8[i] + d79 * k9[i] +
                    d710 * k10[i] + d711 * k11[i]);
    }
    return out;
}

}  // namespace radneumann::detail
