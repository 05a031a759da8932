#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "hh/error.hpp"

namespace hh::ode {

template <class Real>
Real lit(const char* s) {
    if constexpr (std::is_same_v<Real, double>) {
        return std::strtod(s, nullptr);
    } else if constexpr (std::is_same_v<Real, long double>) {
        return std::strtold(s, nullptr);
    } else {
        return Real(s);
    }
}

// Dormand-Prince 8(5,3) coefficients with the seventh-order dense output extension.
template <class Real>
struct Dop853Tableau {
    const Real c2 = lit<Real>("0.526001519587677318785587544488E-01");
    const Real c3 = lit<Real>("0.789002279381515978178381316732E-01");
    const Real c4 = lit<Real>("0.118350341907227396726757197510E+00");
    const Real c5 = lit<Real>("0.281649658092772603273242802490E+00");
    const Real c6 = lit<Real>("0.333333333333333333333333333333E+00");
    const Real c7 = lit<Real>("0.25E+00");
    const Real c8 = lit<Real>("0.307692307692307692307692307692E+00");
    const Real c9 = lit<Real>("0.651282051282051282051282051282E+00");
    const Real c10 = lit<Real>("0.6E+00");
    const Real c11 = lit<Real>("0.857142857142857142857142857142E+00");
    const Real b1 = lit<Real>("5.42937341165687622380535766363E-2");
    const Real b6 = lit<Real>("4.45031289275240888144113950566E0");
    const Real b7 = lit<Real>("1.89151789931450038304281599044E0");
    const Real b8 = lit<Real>("-5.8012039600105847814672114227E0");
    const Real b9 = lit<Real>("3.1116436695781989440891606237E-1");
    const Real b10 = lit<Real>("-1.52160949662516078556178806805E-1");
    const Real b11 = lit<Real>("2.01365400804030348374776537501E-1");
    const Real b12 = lit<Real>("4.47106157277725905176885569043E-2");
    const Real a21 = lit<Real>("5.26001519587677318785587544488E-2");
    const Real a31 = lit<Real>("1.97250569845378994544595329183E-2");
    const Real a32 = lit<Real>("5.91751709536136983633785987549E-2");
    const Real a41 = lit<Real>("2.95875854768068491816892993775E-2");
    const Real a43 = lit<Real>("8.87627564304205475450678981324E-2");
    const Real a51 = lit<Real>("2.41365134159266685502369798665E-1");
    const Real a53 = lit<Real>("-8.84549479328286085344864962717E-1");
    const Real a54 = lit<Real>("9.24834003261792003115737966543E-1");
    const Real a61 = lit<Real>("3.7037037037037037037037037037E-2");
    const Real a64 = lit<Real>("1.70828608729473871279604482173E-1");
    const Real a65 = lit<Real>("1.25467687566822425016691814123E-1");
    const Real a71 = lit<Real>("3.7109375E-2");
    const Real a74 = lit<Real>("1.70252211019544039314978060272E-1");
    const Real a75 = lit<Real>("6.02165389804559606850219397283E-2");
    const Real a76 = lit<Real>("-1.7578125E-2");
    const Real a81 = lit<Real>("3.70920001185047927108779319836E-2");
    const Real a84 = lit<Real>("1.70383925712239993810214054705E-1");
    const Real a85 = lit<Real>("1.07262030446373284651809199168E-1");
    const Real a86 = lit<Real>("-1.53194377486244017527936158236E-2");
    const Real a87 = lit<Real>("8.27378916381402288758473766002E-3");
    const Real a91 = lit<Real>("6.24110958716075717114429577812E-1");
    const Real a94 = lit<Real>("-3.36089262944694129406857109825E0");
    const Real a95 = lit<Real>("-8.68219346841726006818189891453E-1");
    const Real a96 = lit<Real>("2.75920996994467083049415600797E1");
    const Real a97 = lit<Real>("2.01540675504778934086186788979E1");
    const Real a98 = lit<Real>("-4.34898841810699588477366255144E1");
    const Real a101 = lit<Real>("4.77662536438264365890433908527E-1");
    const Real a104 = lit<Real>("-2.48811461997166764192642586468E0");
    const Real a105 = lit<Real>("-5.90290826836842996371446475743E-1");
    const Real a106 = lit<Real>("2.12300514481811942347288949897E1");
    const Real a107 = lit<Real>("1.52792336328824235832596922938E1");
    const Real a108 = lit<Real>("-3.32882109689848629194453265587E1");
    const Real a109 = lit<Real>("-2.03312017085086261358222928593E-2");
    const Real a111 = lit<Real>("-9.3714243008598732571704021658E-1");
    const Real a114 = lit<Real>("5.18637242884406370830023853209E0");
    const Real a115 = lit<Real>("1.09143734899672957818500254654E0");
    const Real a116 = lit<Real>("-8.14978701074692612513997267357E0");
    const Real a117 = lit<Real>("-1.85200656599969598641566180701E1");
    const Real a118 = lit<Real>("2.27394870993505042818970056734E1");
    const Real a119 = lit<Real>("2.49360555267965238987089396762E0");
    const Real a1110 = lit<Real>("-3.0467644718982195003823669022E0");
    const Real a121 = lit<Real>("2.27331014751653820792359768449E0");
    const Real a124 = lit<Real>("-1.05344954667372501984066689879E1");
    const Real a125 = lit<Real>("-2.00087205822486249909675718444E0");
    const Real a126 = lit<Real>("-1.79589318631187989172765950534E1");
    const Real a127 = lit<Real>("2.79488845294199600508499808837E1");
    const Real a128 = lit<Real>("-2.85899827713502369474065508674E0");
    const Real a129 = lit<Real>("-8.87285693353062954433549289258E0");
    const Real a1210 = lit<Real>("1.23605671757943030647266201528E1");
    const Real a1211 = lit<Real>("6.43392746015763530355970484046E-1");
    const Real bhh1 = lit<Real>("0.244094488188976377952755905512E+00");
    const Real bhh2 = lit<Real>("0.733846688281611857341361741547E+00");
    const Real bhh3 = lit<Real>("0.220588235294117647058823529412E-01");
    const Real er1 = lit<Real>("0.1312004499419488073250102996E-01");
    const Real er6 = lit<Real>("-0.1225156446376204440720569753E+01");
    const Real er7 = lit<Real>("-0.4957589496572501915214079952E+00");
    const Real er8 = lit<Real>("0.1664377182454986536961530415E+01");
    const Real er9 = lit<Real>("-0.3503288487499736816886487290E+00");
    const Real er10 = lit<Real>("0.3341791187130174790297318841E+00");
    const Real er11 = lit<Real>("0.8192320648511571246570742613E-01");
    const Real er12 = lit<Real>("-0.2235530786388629525884427845E-01");
    const Real c14 = lit<Real>("0.1E+00");
    const Real c15 = lit<Real>("0.2E+00");
    const Real c16 = lit<Real>("0.777777777777777777777777777778E+00");
    const Real a141 = lit<Real>("5.61675022830479523392909219681E-2");
    const Real a147 = lit<Real>("2.53500210216624811088794765333E-1");
    const Real a148 = lit<Real>("-2.46239037470802489917441475441E-1");
    const Real a149 = lit<Real>("-1.24191423263816360469010140626E-1");
    const Real a1410 = lit<Real>("1.5329179827876569731206322685E-1");
    const Real a1411 = lit<Real>("8.20105229563468988491666602057E-3");
    const Real a1412 = lit<Real>("7.56789766054569976138603589584E-3");
    const Real a1413 = lit<Real>("-8.298E-3");
    const Real a151 = lit<Real>("3.18346481635021405060768473261E-2");
    const Real a156 = lit<Real>("2.83009096723667755288322961402E-2");
    const Real a157 = lit<Real>("5.35419883074385676223797384372E-2");
    const Real a158 = lit<Real>("-5.49237485713909884646569340306E-2");
    const Real a1511 = lit<Real>("-1.08347328697249322858509316994E-4");
    const Real a1512 = lit<Real>("3.82571090835658412954920192323E-4");
    const Real a1513 = lit<Real>("-3.40465008687404560802977114492E-4");
    const Real a1514 = lit<Real>("1.41312443674632500278074618366E-1");
    const Real a161 = lit<Real>("-4.28896301583791923408573538692E-1");
    const Real a166 = lit<Real>("-4.69762141536116384314449447206E0");
    const Real a167 = lit<Real>("7.68342119606259904184240953878E0");
    const Real a168 = lit<Real>("4.06898981839711007970213554331E0");
    const Real a169 = lit<Real>("3.56727187455281109270669543021E-1");
    const Real a1613 = lit<Real>("-1.39902416515901462129418009734E-3");
    const Real a1614 = lit<Real>("2.9475147891527723389556272149E0");
    const Real a1615 = lit<Real>("-9.15095847217987001081870187138E0");
    const Real d41 = lit<Real>("-0.84289382761090128651353491142E+01");
    const Real d46 = lit<Real>("0.56671495351937776962531783590E+00");
    const Real d47 = lit<Real>("-0.30689499459498916912797304727E+01");
    const Real d48 = lit<Real>("0.23846676565120698287728149680E+01");
    const Real d49 = lit<Real>("0.21170345824450282767155149946E+01");
    const Real d410 = lit<Real>("-0.87139158377797299206789907490E+00");
    const Real d411 = lit<Real>("0.22404374302607882758541771650E+01");
    const Real d412 = lit<Real>("0.63157877876946881815570249290E+00");
    const Real d413 = lit<Real>("-0.88990336451333310820698117400E-01");
    const Real d414 = lit<Real>("0.18148505520854727256656404962E+02");
    const Real d415 = lit<Real>("-0.91946323924783554000451984436E+01");
    const Real d416 = lit<Real>("-0.44360363875948939664310572000E+01");
    const Real d51 = lit<Real>("0.10427508642579134603413151009E+02");
    const Real d56 = lit<Real>("0.24228349177525818288430175319E+03");
    const Real d57 = lit<Real>("0.16520045171727028198505394887E+03");
    const Real d58 = lit<Real>("-0.37454675472269020279518312152E+03");
    const Real d59 = lit<Real>("-0.22113666853125306036270938578E+02");
    const Real d510 = lit<Real>("0.77334326684722638389603898808E+01");
    const Real d511 = lit<Real>("-0.30674084731089398182061213626E+02");
    const Real d512 = lit<Real>("-0.93321305264302278729567221706E+01");
    const Real d513 = lit<Real>("0.15697238121770843886131091075E+02");
    const Real d514 = lit<Real>("-0.31139403219565177677282850411E+02");
    const Real d515 = lit<Real>("-0.93529243588444783865713862664E+01");
    const Real d516 = lit<Real>("0.35816841486394083752465898540E+02");
    const Real d61 = lit<Real>("0.19985053242002433820987653617E+02");
    const Real d66 = lit<Real>("-0.38703730874935176555105901742E+03");
    const Real d67 = lit<Real>("-0.18917813819516756882830838328E+03");
    const Real d68 = lit<Real>("0.52780815920542364900561016686E+03");
    const Real d69 = lit<Real>("-0.11573902539959630126141871134E+02");
    const Real d610 = lit<Real>("0.68812326946963000169666922661E+01");
    const Real d611 = lit<Real>("-0.10006050966910838403183860980E+01");
    const Real d612 = lit<Real>("0.77771377980534432092869265740E+00");
    const Real d613 = lit<Real>("-0.27782057523535084065932004339E+01");
    const Real d614 = lit<Real>("-0.60196695231264120758267380846E+02");
    const Real d615 = lit<Real>("0.84320405506677161018159903784E+02");
    const Real d616 = lit<Real>("0.11992291136182789328035130030E+02");
    const Real d71 = lit<Real>("-0.25693933462703749003312586129E+02");
    const Real d76 = lit<Real>("-0.15418974869023643374053993627E+03");
    const Real d77 = lit<Real>("-0.23152937917604549567536039109E+03");
    const Real d78 = lit<Real>("0.35763911791061412378285349910E+03");
    const Real d79 = lit<Real>("0.93405324183624310003907691704E+02");
    const Real d710 = lit<Real>("-0.37458323136451633156875139351E+02");
    const Real d711 = lit<Real>("0.10409964950896230045147246184E+03");
    const Real d712 = lit<Real>("0.29840293426660503123344363579E+02");
    const Real d713 = lit<Real>("-0.43533456590011143754432175058E+02");
    const Real d714 = lit<Real>("0.96324553959188282948394950600E+02");
    const Real d715 = lit<Real>("-0.39177261675615439165231486172E+02");
    const Real d716 = lit<Real>("-0.14972683625798562581422125276E+03");

    static const Dop853Tableau& get() {
        static const Dop853Tableau t;
        return t;
    }
};

template <class Real, std::size_t Dim>
struct DenseSegment {
    using State = std::array<Real, Dim>;
    Real t0{};
    Real h{};
    std::array<State, 8> rc{};

    State eval(Real t) const {
        const Real s = (t - t0) / h;
        const Real s1 = Real(1) - s;
        State y;
        for (std::size_t i = 0; i < Dim; ++i)
            y[i] = rc[0][i] + s * (rc[1][i] + s1 * (rc[2][i] + s * (rc[3][i] +
                   s1 * (rc[4][i] + s * (rc[5][i] + s1 * (rc[6][i] + s * rc[7][i]))))));
        return y;
    }
};

template <class Real>
struct Dop853Options {
    Real rtol = Real(1e-10);
    Real atol = Real(1e-12);
    Real h_max = Real(0);
    Real h_init = Real(0);
    long max_steps = 1000000;
    Real safe = Real(0.9);
    Real fac1 = Real(0.333);
    Real fac2 = Real(6.0);
    Real beta = Real(0);
};

// F: void(Real t, const State& y, State& dydt)
template <class Real, std::size_t Dim, class F>
class Dop853 {
public:
    using State = std::array<Real, Dim>;
    using Segment = DenseSegment<Real, Dim>;

    Dop853(F f, Dop853Options<Real> opt) : f_(std::move(f)), opt_(opt) {}

    void reset(Real t0, const State& y0) {
        t_ = t0;
        told_ = t0;
        y_ = y0;
        yold_ = y0;
        steps_ = rejects_ = 0;
        evals_ = 1;
        facold_ = Real(1e-4);
        reject_ = false;
        dense_ready_ = false;
        f_(t_, y_, k1_);
        h_ = opt_.h_init > 0 ? opt_.h_init : Real(0);
    }

    // One accepted step, clipped so that t does not pass t_end. Returns false once t == t_end.
    bool step(Real t_end) {
        using std::abs;
        using std::max;
        using std::min;
        using std::pow;
        const Real eps = std::numeric_limits<Real>::epsilon();
        if (t_ >= t_end) return false;
        Real hmax = opt_.h_max > 0 ? opt_.h_max : t_end - t_;
        if (h_ <= 0) h_ = hinit(hmax);
        const Real facc1 = Real(1) / opt_.fac1;
        const Real facc2 = Real(1) / opt_.fac2;
        const Real expo1 = Real(1) / Real(8) - opt_.beta * Real(0.2);
        while (true) {
            if (steps_ + rejects_ > opt_.max_steps)
                fail(ErrorCode::IntegratorStall, "step budget exhausted at t=" + std::to_string(static_cast<double>(t_)));
            if (Real(0.1) * abs(h_) <= abs(t_) * eps)
                fail(ErrorCode::IntegratorStall, "step size underflow at t=" + std::to_string(static_cast<double>(t_)));
            bool last = false;
            if (t_ + Real(1.01) * h_ - t_end > 0) {
                h_ = t_end - t_;
                last = true;
            }
            step12();
            Real err = abs(h_) * error_estimation();
            Real fac11 = pow(err, expo1);
            Real fac = fac11 / pow(facold_, opt_.beta);
            fac = max(facc2, min(facc1, fac / opt_.safe));
            Real hnew = h_ / fac;
            if (err <= 1) {
                facold_ = max(err, Real(1e-4));
                ++steps_;
                f_(tph_, k5_, k4_);
                ++evals_;
                yold_ = y_;
                fold_ = k1_;
                y_ = k5_;
                k1_ = k4_;
                told_ = t_;
                t_ = last ? t_end : tph_;
                hlast_ = t_ - told_;
                last_err_ = err;
                dense_ready_ = false;
                if (abs(hnew) > hmax) hnew = hmax;
                if (reject_) hnew = min(abs(hnew), abs(h_));
                reject_ = false;
                h_ = hnew;
                return true;
            }
            hnew = h_ / min(facc1, fac11 / opt_.safe);
            reject_ = true;
            if (steps_ >= 1) ++rejects_;
            h_ = hnew;
        }
    }

    Real t() const { return t_; }
    Real t_old() const { return told_; }
    Real h_last() const { return hlast_; }
    const State& y() const { return y_; }
    const State& y_old() const { return yold_; }
    const State& dydt() const { return k1_; }
    long steps() const { return steps_; }
    long rejects() const { return rejects_; }
    long evals() const { return evals_; }
    Real last_error() const { return last_err_; }

    // Dense output on [t_old, t]; three extra evaluations on first use per step.
    State dense(Real t) {
        prepare_dense();
        return seg_.eval(t);
    }

    const Segment& segment() {
        prepare_dense();
        return seg_;
    }

private:
    Real hinit(Real hmax) {
        using std::abs;
        using std::max;
        using std::min;
        using std::pow;
        using std::sqrt;
        Real dnf = 0, dny = 0, der2 = 0;
        for (std::size_t i = 0; i < Dim; ++i) {
            const Real sk = opt_.atol + opt_.rtol * abs(y_[i]);
            Real q = k1_[i] / sk;
            dnf += q * q;
            q = y_[i] / sk;
            dny += q * q;
        }
        Real h = (dnf <= Real(1e-10) || dny <= Real(1e-10)) ? Real(1e-6) : sqrt(dny / dnf) * Real(0.01);
        h = min(h, hmax);
        for (std::size_t i = 0; i < Dim; ++i) w1_[i] = y_[i] + h * k1_[i];
        f_(t_ + h, w1_, k2_);
        ++evals_;
        for (std::size_t i = 0; i < Dim; ++i) {
            const Real q = (k2_[i] - k1_[i]) / (opt_.atol + opt_.rtol * abs(y_[i]));
            der2 += q * q;
        }
        der2 = sqrt(der2) / h;
        const Real der12 = max(abs(der2), sqrt(dnf));
        const Real h1 = der12 <= Real(1e-15) ? max(Real(1e-6), abs(h) * Real(1e-3)) : pow(Real(0.01) / der12, Real(0.125));
        return min(Real(100) * abs(h), min(h1, hmax));
    }

    void step12() {
        const auto& T = Dop853Tableau<Real>::get();
        const Real h = h_;
        const Real t = t_;
        const State& w = y_;
        for (std::size_t i = 0; i < Dim; ++i) w1_[i] = w[i] + h * T.a21 * k1_[i];
        f_(t + T.c2 * h, w1_, k2_);
        for (std::size_t i = 0; i < Dim; ++i) w1_[i] = w[i] + h * (T.a31 * k1_[i] + T.a32 * k2_[i]);
        f_(t + T.c3 * h, w1_, k3_);
        for (std::size_t i = 0; i < Dim; ++i) w1_[i] = w[i] + h * (T.a41 * k1_[i] + T.a43 * k3_[i]);
        f_(t + T.c4 * h, w1_, k4_);
        for (std::size_t i = 0; i < Dim; ++i) w1_[i] = w[i] + h * (T.a51 * k1_[i] + T.a53 * k3_[i] + T.a54 * k4_[i]);
        f_(t + T.c5 * h, w1_, k5_);
        for (std::size_t i = 0; i < Dim; ++i) w1_[i] = w[i] + h * (T.a61 * k1_[i] + T.a64 * k4_[i] + T.a65 * k5_[i]);
        f_(t + T.c6 * h, w1_, k6_);
        for (std::size_t i = 0; i < Dim; ++i)
            w1_[i] = w[i] + h * (T.a71 * k1_[i] + T.a74 * k4_[i] + T.a75 * k5_[i] + T.a76 * k6_[i]);
        f_(t + T.c7 * h, w1_, k7_);
        for (std::size_t i = 0; i < Dim; ++i)
            w1_[i] = w[i] + h * (T.a81 * k1_[i] + T.a84 * k4_[i] + T.a85 * k5_[i] + T.a86 * k6_[i] + T.a87 * k7_[i]);
        f_(t + T.c8 * h, w1_, k8_);
        for (std::size_t i = 0; i < Dim; ++i)
            w1_[i] = w[i] + h * (T.a91 * k1_[i] + T.a94 * k4_[i] + T.a95 * k5_[i] + T.a96 * k6_[i] + T.a97 * k7_[i] +
                                 T.a98 * k8_[i]);
        f_(t + T.c9 * h, w1_, k9_);
        for (std::size_t i = 0; i < Dim; ++i)
            w1_[i] = w[i] + h * (T.a101 * k1_[i] + T.a104 * k4_[i] + T.a105 * k5_[i] + T.a106 * k6_[i] +
                                 T.a107 * k7_[i] + T.a108 * k8_[i] + T.a109 * k9_[i]);
        f_(t + T.c10 * h, w1_, k10_);
        for (std::size_t i = 0; i < Dim; ++i)
            w1_[i] = w[i] + h * (T.a111 * k1_[i] + T.a114 * k4_[i] + T.a115 * k5_[i] + T.a116 * k6_[i] +
                                 T.a117 * k7_[i] + T.a118 * k8_[i] + T.a119 * k9_[i] + T.a1110 * k10_[i]);
        f_(t + T.c11 * h, w1_, k2_);
        tph_ = t + h;
        for (std::size_t i = 0; i < Dim; ++i)
            w1_[i] = w[i] + h * (T.a121 * k1_[i] + T.a124 * k4_[i] + T.a125 * k5_[i] + T.a126 * k6_[i] +
                                 T.a127 * k7_[i] + T.a128 * k8_[i] + T.a129 * k9_[i] + T.a1210 * k10_[i] +
                                 T.a1211 * k2_[i]);
        f_(tph_, w1_, k3_);
        evals_ += 11;
        for (std::size_t i = 0; i < Dim; ++i) {
            k4_[i] = T.b1 * k1_[i] + T.b6 * k6_[i] + T.b7 * k7_[i] + T.b8 * k8_[i] + T.b9 * k9_[i] +
                     T.b10 * k10_[i] + T.b11 * k2_[i] + T.b12 * k3_[i];
            k5_[i] = w[i] + h * k4_[i];
        }
    }

    Real error_estimation() {
        using std::abs;
        using std::max;
        using std::sqrt;
        const auto& T = Dop853Tableau<Real>::get();
        Real err = 0, err2 = 0;
        for (std::size_t i = 0; i < Dim; ++i) {
            const Real sk = Real(1) / (opt_.atol + opt_.rtol * max(abs(y_[i]), abs(k5_[i])));
            Real q = (k4_[i] - T.bhh1 * k1_[i] - T.bhh2 * k9_[i] - T.bhh3 * k3_[i]) * sk;
            err2 += q * q;
            q = (T.er1 * k1_[i] + T.er6 * k6_[i] + T.er7 * k7_[i] + T.er8 * k8_[i] + T.er9 * k9_[i] +
                 T.er10 * k10_[i] + T.er11 * k2_[i] + T.er12 * k3_[i]) * sk;
            err += q * q;
        }
        const Real deno = err + Real(0.01) * err2;
        return err * sqrt(Real(1) / (deno <= 0 ? Real(Dim) : deno * Real(Dim)));
    }

    // Uses the stage values of the last accepted step; k1 of that step lives in fold_, its
    // end derivative in k1_.
    void prepare_dense() {
        if (dense_ready_) return;
        const auto& T = Dop853Tableau<Real>::get();
        const Real h = t_ - told_;
        const State& w = yold_;
        const State& f0 = fold_;
        const State& f1 = k1_;
        auto& rc = seg_.rc;
        for (std::size_t i = 0; i < Dim; ++i) {
            rc[0][i] = w[i];
            const Real ydiff = y_[i] - w[i];
            rc[1][i] = ydiff;
            const Real bspl = h * f0[i] - ydiff;
            rc[2][i] = bspl;
            rc[3][i] = ydiff - h * f1[i] - bspl;
            rc[4][i] = T.d41 * f0[i] + T.d46 * k6_[i] + T.d47 * k7_[i] + T.d48 * k8_[i] + T.d49 * k9_[i] +
                       T.d410 * k10_[i] + T.d411 * k2_[i] + T.d412 * k3_[i];
            rc[5][i] = T.d51 * f0[i] + T.d56 * k6_[i] + T.d57 * k7_[i] + T.d58 * k8_[i] + T.d59 * k9_[i] +
                       T.d510 * k10_[i] + T.d511 * k2_[i] + T.d512 * k3_[i];
            rc[6][i] = T.d61 * f0[i] + T.d66 * k6_[i] + T.d67 * k7_[i] + T.d68 * k8_[i] + T.d69 * k9_[i] +
                       T.d610 * k10_[i] + T.d611 * k2_[i] + T.d612 * k3_[i];
            rc[7][i] = T.d71 * f0[i] + T.d76 * k6_[i] + T.d77 * k7_[i] + T.d78 * k8_[i] + T.d79 * k9_[i] +
                       T.d710 * k10_[i] + T.d711 * k2_[i] + T.d712 * k3_[i];
        }
        State s14, s15, s16;
        for (std::size_t i = 0; i < Dim; ++i)
            w1_[i] = w[i] + h * (T.a141 * f0[i] + T.a147 * k7_[i] + T.a148 * k8_[i] + T.a149 * k9_[i] +
                                 T.a1410 * k10_[i] + T.a1411 * k2_[i] + T.a1412 * k3_[i] + T.a1413 * f1[i]);
        f_(told_ + T.c14 * h, w1_, s14);
        for (std::size_t i = 0; i < Dim; ++i)
            w1_[i] = w[i] + h * (T.a151 * f0[i] + T.a156 * k6_[i] + T.a157 * k7_[i] + T.a158 * k8_[i] +
                                 T.a1511 * k2_[i] + T.a1512 * k3_[i] + T.a1513 * f1[i] + T.a1514 * s14[i]);
        f_(told_ + T.c15 * h, w1_, s15);
        for (std::size_t i = 0; i < Dim; ++i)
            w1_[i] = w[i] + h * (T.a161 * f0[i] + T.a166 * k6_[i] + T.a167 * k7_[i] + T.a168 * k8_[i] +
                                 T.a169 * k9_[i] + T.a1613 * f1[i] + T.a1614 * s14[i] + T.a1615 * s15[i]);
        f_(told_ + T.c16 * h, w1_, s16);
        evals_ += 3;
        for (std::size_t i = 0; i < Dim; ++i) {
            rc[4][i] = h * (rc[4][i] + T.d413 * f1[i] + T.d414 * s14[i] + T.d415 * s15[i] + T.d416 * s16[i]);
            rc[5][i] = h * (rc[5][i] + T.d513 * f1[i] + T.d514 * s14[i] + T.d515 * s15[i] + T.d516 * s16[i]);
            rc[6][i] = h * (rc[6][i] + T.d613 * f1[i] + T.d614 * s14[i] + T.d615 * s15[i] + T.d616 * s16[i]);
            rc[7][i] = h * (rc[7][i] + T.d713 * f1[i] + T.d714 * s14[i] + T.d715 * s15[i] + T.d716 * s16[i]);
        }
        seg_.t0 = told_;
        seg_.h = h;
        dense_ready_ = true;
    }

    F f_;
    Dop853Options<Real> opt_;
    Real t_{}, told_{}, tph_{}, h_{}, hlast_{}, facold_{}, last_err_{};
    State y_{}, yold_{}, fold_{}, w1_{};
    State k1_{}, k2_{}, k3_{}, k4_{}, k5_{}, k6_{}, k7_{}, k8_{}, k9_{}, k10_{};
    Segment seg_{};
    long steps_ = 0, rejects_ = 0, evals_ = 0;
    bool reject_ = false;
    bool dense_ready_ = false;
};

}  // namespace hh::ode
