#include "octoval/fields.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace octoval {

double chi(double x) {
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return x;
    const double t = 0.5 * (x + 1.0);
    const double t2 = t * t;
    return t2 * t2 * (2.0 * t2 - 6.0 * t + 5.0);
}

double chi_prime(double x) {
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double t = 0.5 * (x + 1.0);
    return t * t * t * (6.0 * t * t - 15.0 * t + 10.0);
}

double chi_second(double x) {
    if (x <= -1.0 || x >= 1.0) return 0.0;
    const double t = 0.5 * (x + 1.0);
    const double omt = 1.0 - t;
    return 15.0 * t * t * omt * omt;
}

namespace fields {

ScalarField normsq() {
    ScalarField f;
    f.hint = ScalarField::Smoothness::QuadraticExact;
    f.eval = [](const Vec16& x) { return x.squaredNorm(); };
    f.grad = [](const Vec16& x) { return Vec16(2.0 * x); };
    f.hess = [](const Vec16&) { return Mat16(2.0 * Mat16::Identity()); };
    return f;
}

ScalarField normsq1() {
    ScalarField f;
    f.hint = ScalarField::Smoothness::QuadraticExact;
    f.eval = [](const Vec16& x) { return x.head<8>().squaredNorm(); };
    f.grad = [](const Vec16& x) {
        Vec16 g = Vec16::Zero();
        g.head<8>() = 2.0 * x.head<8>();
        return g;
    };
    f.hess = [](const Vec16&) {
        Mat16 m = Mat16::Zero();
        m.topLeftCorner<8, 8>() = 2.0 * Eigen::Matrix<double, 8, 8>::Identity();
        return m;
    };
    return f;
}

ScalarField re_q1_conj_q2() {
    ScalarField f;
    f.hint = ScalarField::Smoothness::QuadraticExact;
    f.eval = [](const Vec16& x) { return x.head<8>().dot(x.tail<8>()); };
    f.grad = [](const Vec16& x) {
        Vec16 g;
        g.head<8>() = x.tail<8>();
        g.tail<8>() = x.head<8>();
        return g;
    };
    f.hess = [](const Vec16&) {
        Mat16 m = Mat16::Zero();
        m.topRightCorner<8, 8>() = Eigen::Matrix<double, 8, 8>::Identity();
        m.bottomLeftCorner<8, 8>() = Eigen::Matrix<double, 8, 8>::Identity();
        return m;
    };
    return f;
}

ScalarField abs_norm() {
    ScalarField f;
    f.hint = ScalarField::Smoothness::Continuous;
    f.eval = [](const Vec16& x) { return x.norm(); };
    return f;
}

ScalarField gaussian(double scale) { return gaussian_at(Vec16::Zero(), scale); }

ScalarField gaussian_at(const Vec16& mu, double scale) {
    if (scale <= 0.0) throw std::domain_error("gaussian: scale must be positive");
    ScalarField f;
    const double inv2 = 1.0 / (2.0 * scale * scale);
    const double inv = 1.0 / (scale * scale);
    f.eval = [mu, inv2](const Vec16& x) { return std::exp(-(x - mu).squaredNorm() * inv2); };
    f.grad = [mu, inv2, inv](const Vec16& x) {
        const Vec16 d = x - mu;
        return Vec16(-inv * std::exp(-d.squaredNorm() * inv2) * d);
    };
    f.hess = [mu, inv2, inv](const Vec16& x) {
        const Vec16 d = x - mu;
        const double e = std::exp(-d.squaredNorm() * inv2);
        return Mat16(e * (inv * inv * d * d.transpose() - inv * Mat16::Identity()));
    };
    return f;
}

ScalarField quadform(const Mat16& b) {
    if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + b.cwiseAbs().maxCoeff()))
        throw std::domain_error("quadform: matrix must be symmetric");
    ScalarField f;
    f.hint = ScalarField::Smoothness::QuadraticExact;
    f.eval = [b](const Vec16& x) { return x.dot(b * x); };
    f.grad = [b](const Vec16& x) { return Vec16(2.0 * (b * x)); };
    f.hess = [b](const Vec16&) { return Mat16(2.0 * b); };
    return f;
}

ScalarField linear(const Vec16& v, double c) {
    ScalarField f;
    f.hint = ScalarField::Smoothness::QuadraticExact;
    f.eval = [v, c](const Vec16& x) { return v.dot(x) + c; };
    f.grad = [v](const Vec16&) { return v; };
    f.hess = [](const Vec16&) { return Mat16(Mat16::Zero()); };
    return f;
}

ScalarField poly_bump(const Vec16& center, const Mat16& shape, int power, double amplitude) {
    if (power < 2) throw std::domain_error("poly_bump: power must be >= 2 for C^1 smoothness");
    ScalarField f;
    f.hint = ScalarField::Smoothness::Smooth;
    f.eval = [center, shape, power, amplitude](const Vec16& x) {
        const Vec16 d = x - center;
        const double u = 1.0 - d.dot(shape * d);
        return (u <= 0.0) ? 0.0 : amplitude * std::pow(u, power);
    };
    f.grad = [center, shape, power, amplitude](const Vec16& x) {
        const Vec16 d = x - center;
        const double u = 1.0 - d.dot(shape * d);
        if (u <= 0.0) return Vec16(Vec16::Zero());
        return Vec16(-2.0 * amplitude * power * std::pow(u, power - 1) * (shape * d));
    };
    f.hess = [center, shape, power, amplitude](const Vec16& x) {
        const Vec16 d = x - center;
        const double u = 1.0 - d.dot(shape * d);
        if (u <= 0.0) return Mat16(Mat16::Zero());
        const Vec16 sd = shape * d;
        Mat16 h = 4.0 * amplitude * power * (power - 1) * std::pow(u, power - 2) * sd *
                      sd.transpose() -
                  2.0 * amplitude * power * std::pow(u, power - 1) * shape;
        return h;
    };
    // Bounding box of {d : d^T S d <= 1}: half-width_i = sqrt((S^{-1})_ii).
    const Mat16 inv = shape.inverse();
    Box support;
    for (int i = 0; i < 16; ++i) {
        const double hw = std::sqrt(std::max(0.0, inv(i, i)));
        support.lo[i] = center[i] - hw;
        support.hi[i] = center[i] + hw;
    }
    f.support = support;
    return f;
}

ScalarField ball_bump(const Vec16& center, double radius, int power, double amplitude) {
    if (radius <= 0.0) throw std::domain_error("ball_bump: radius must be positive");
    return poly_bump(center, Mat16(Mat16::Identity() / (radius * radius)), power, amplitude);
}

namespace {

struct EdgeProfile {
    double value = 0.0, d1 = 0.0, d2 = 0.0;
};

// Quintic smoothstep S(s) = 6s^5 - 15s^4 + 10s^3 evaluated with derivatives.
EdgeProfile smoothstep(double s) {
    EdgeProfile p;
    if (s <= 0.0) return p;
    if (s >= 1.0) {
        p.value = 1.0;
        return p;
    }
    const double s2 = s * s;
    p.value = s2 * s * (10.0 + s * (6.0 * s - 15.0));
    p.d1 = 30.0 * s2 * (1.0 - s) * (1.0 - s);
    p.d2 = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
    return p;
}

// One coordinate factor of the plateau bump on [lo, hi].
EdgeProfile plateau_factor(double x, double lo, double hi, double plateau) {
    EdgeProfile out;
    const double half = 0.5 * (hi - lo);
    if (half <= 0.0) return out;
    const double t = (x - 0.5 * (lo + hi)) / half; // in [-1, 1] inside the box
    const double at = std::abs(t);
    if (at >= 1.0) return out;
    if (at <= plateau) {
        out.value = 1.0;
        return out;
    }
    const double w = 1.0 - plateau;
    const EdgeProfile s = smoothstep((1.0 - at) / w);
    const double sign = (t >= 0.0) ? 1.0 : -1.0;
    const double dt_dx = 1.0 / half;
    out.value = s.value;
    out.d1 = -s.d1 * sign / w * dt_dx;
    out.d2 = s.d2 / (w * w) * dt_dx * dt_dx;
    return out;
}

} // namespace

ScalarField smooth_box_bump(const Box& box, double amplitude, double plateau) {
    if (plateau <= 0.0 || plateau >= 1.0)
        throw std::domain_error("smooth_box_bump: plateau fraction must be in (0, 1)");
    const Vec16 lo = box.lo, hi = box.hi;
    ScalarField f;
    f.hint = ScalarField::Smoothness::Smooth;
    f.support = box;
    auto factors = [lo, hi, plateau](const Vec16& x, EdgeProfile* g) {
        for (int i = 0; i < 16; ++i) g[i] = plateau_factor(x[i], lo[i], hi[i], plateau);
    };
    f.eval = [factors, amplitude](const Vec16& x) {
        EdgeProfile g[16];
        factors(x, g);
        double p = amplitude;
        for (int i = 0; i < 16; ++i) {
            p *= g[i].value;
            if (p == 0.0) return 0.0;
        }
        return p;
    };
    f.grad = [factors, amplitude](const Vec16& x) {
        EdgeProfile g[16];
        factors(x, g);
        Vec16 out = Vec16::Zero();
        for (int i = 0; i < 16; ++i) {
            double p = amplitude * g[i].d1;
            for (int j = 0; j < 16 && p != 0.0; ++j)
                if (j != i) p *= g[j].value;
            out[i] = p;
        }
        return out;
    };
    f.hess = [factors, amplitude](const Vec16& x) {
        EdgeProfile g[16];
        factors(x, g);
        Mat16 out = Mat16::Zero();
        for (int i = 0; i < 16; ++i) {
            for (int j = i; j < 16; ++j) {
                double p = amplitude * (i == j ? g[i].d2 : g[i].d1 * g[j].d1);
                for (int k = 0; k < 16 && p != 0.0; ++k)
                    if (k != i && k != j) p *= g[k].value;
                out(i, j) = p;
                out(j, i) = p;
            }
        }
        return out;
    };
    return f;
}

ScalarField sum(const ScalarField& f, const ScalarField& g) {
    ScalarField out;
    out.fd_step = std::min(f.fd_step, g.fd_step);
    out.hint = std::max(f.hint, g.hint); // enum order: exact < smooth < continuous
    const auto fe = f.eval, ge = g.eval;
    out.eval = [fe, ge](const Vec16& x) { return fe(x) + ge(x); };
    if (f.grad && g.grad) {
        const auto fg = f.grad, gg = g.grad;
        out.grad = [fg, gg](const Vec16& x) { return Vec16(fg(x) + gg(x)); };
    }
    if (f.hess && g.hess) {
        const auto fh = f.hess, gh = g.hess;
        out.hess = [fh, gh](const Vec16& x) { return Mat16(fh(x) + gh(x)); };
    }
    if (f.support && g.support) out.support = f.support->hull(*g.support);
    return out;
}

ScalarField scaled(double s, const ScalarField& f) {
    ScalarField out = f;
    const auto fe = f.eval;
    out.eval = [s, fe](const Vec16& x) { return s * fe(x); };
    if (f.grad) {
        const auto fg = f.grad;
        out.grad = [s, fg](const Vec16& x) { return Vec16(s * fg(x)); };
    }
    if (f.hess) {
        const auto fh = f.hess;
        out.hess = [s, fh](const Vec16& x) { return Mat16(s * fh(x)); };
    }
    return out;
}

ScalarField pointwise_max(const ScalarField& f, const ScalarField& g) {
    ScalarField out;
    out.fd_step = std::min(f.fd_step, g.fd_step);
    out.hint = ScalarField::Smoothness::Continuous;
    const auto fe = f.eval, ge = g.eval;
    out.eval = [fe, ge](const Vec16& x) { return std::max(fe(x), ge(x)); };
    if (f.grad && g.grad) {
        const auto fg = f.grad, gg = g.grad;
        out.grad = [fe, ge, fg, gg](const Vec16& x) {
            return fe(x) >= ge(x) ? fg(x) : gg(x);
        };
    }
    if (f.hess && g.hess) {
        const auto fh = f.hess, gh = g.hess;
        out.hess = [fe, ge, fh, gh](const Vec16& x) {
            return fe(x) >= ge(x) ? fh(x) : gh(x);
        };
    }
    if (f.support && g.support) out.support = f.support->hull(*g.support);
    return out;
}

ScalarField compose_linear(const ScalarField& f, const Mat16& a, const Vec16& b) {
    ScalarField out;
    out.fd_step = f.fd_step;
    out.hint = f.hint;
    const auto fe = f.eval;
    out.eval = [fe, a, b](const Vec16& x) { return fe(a * x + b); };
    if (f.grad) {
        const auto fg = f.grad;
        out.grad = [fg, a, b](const Vec16& x) { return Vec16(a.transpose() * fg(a * x + b)); };
    }
    if (f.hess) {
        const auto fh = f.hess;
        out.hess = [fh, a, b](const Vec16& x) {
            return Mat16(a.transpose() * fh(a * x + b) * a);
        };
    }
    return out;
}

ScalarField chi_max(const ScalarField& f, const ScalarField& g, double level) {
    if (level <= 0.0) throw std::domain_error("chi_max: level must be positive");
    ScalarField out;
    out.fd_step = std::min(f.fd_step, g.fd_step);
    out.hint = ScalarField::Smoothness::Smooth;
    const auto fe = f.eval, ge = g.eval;
    out.eval = [fe, ge, level](const Vec16& x) {
        const double gv = ge(x);
        return gv + chi(level * (fe(x) - gv)) / level;
    };
    if (f.grad && g.grad) {
        const auto fg = f.grad, gg = g.grad;
        out.grad = [fe, ge, fg, gg, level](const Vec16& x) {
            const double alpha = fe(x) - ge(x);
            const double cp = chi_prime(level * alpha);
            return Vec16(gg(x) + cp * (fg(x) - gg(x)));
        };
    }
    if (f.hess && g.hess && f.grad && g.grad) {
        const auto fg = f.grad, gg = g.grad;
        const auto fh = f.hess, gh = g.hess;
        out.hess = [fe, ge, fg, gg, fh, gh, level](const Vec16& x) {
            const double alpha = fe(x) - ge(x);
            const double cp = chi_prime(level * alpha);
            const double cs = chi_second(level * alpha);
            const Vec16 da = fg(x) - gg(x);
            return Mat16(gh(x) + cp * (fh(x) - gh(x)) + level * cs * da * da.transpose());
        };
    }
    if (f.support && g.support) out.support = f.support->hull(*g.support);
    return out;
}

ScalarField random_quartic(Rng& rng) {
    Mat16 a = Mat16::Zero(), b = Mat16::Zero(), c = Mat16::Zero();
    for (int i = 0; i < 16; ++i)
        for (int j = i; j < 16; ++j) {
            a(i, j) = a(j, i) = rng.uniform(-0.5, 0.5);
            b(i, j) = b(j, i) = rng.uniform(-0.5, 0.5);
            c(i, j) = c(j, i) = rng.uniform(-0.5, 0.5);
        }
    Vec16 u, v;
    for (int i = 0; i < 16; ++i) {
        u[i] = rng.uniform(-1.0, 1.0);
        v[i] = rng.uniform(-1.0, 1.0);
    }
    ScalarField f;
    f.hint = ScalarField::Smoothness::Smooth;
    f.eval = [a, b, c, u, v](const Vec16& x) {
        const double qa = x.dot(a * x);
        const double qb = x.dot(b * x);
        return 0.25 * qa * qb + u.dot(x) * x.dot(c * x) + qa + v.dot(x);
    };
    return f;
}

// ---------------------------------------------------------------------------
// Mini-language: expr := term ('+' term)*; term := [scalar '*'] atom;
// atom := name | name '(' arg ')' .

namespace {

struct Parser {
    const std::string& text;
    std::size_t pos = 0;

    explicit Parser(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool peek(char c) {
        skip_ws();
        return pos < text.size() && text[pos] == c;
    }
    bool consume(char c) {
        if (!peek(c)) return false;
        ++pos;
        return true;
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw std::invalid_argument("field spec: " + msg + " at position " + std::to_string(pos) +
                                    " in '" + text + "'");
    }

    ScalarField parse_expr() {
        ScalarField acc = parse_term();
        while (consume('+')) acc = sum(acc, parse_term());
        skip_ws();
        return acc;
    }

    ScalarField parse_term() {
        skip_ws();
        const std::size_t save = pos;
        if (pos < text.size() &&
            (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '-' ||
             text[pos] == '.')) {
            char* end = nullptr;
            const double s = std::strtod(text.c_str() + pos, &end);
            const std::size_t after = std::size_t(end - text.c_str());
            Parser probe(text);
            probe.pos = after;
            if (after > pos && probe.consume('*')) {
                pos = probe.pos;
                return scaled(s, parse_atom());
            }
            pos = save;
        }
        return parse_atom();
    }

    std::string parse_name() {
        skip_ws();
        const std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '-' ||
                text[pos] == '_')) {
            ++pos;
        }
        if (pos == start) fail("expected a field name");
        return text.substr(start, pos - start);
    }

    std::string parse_paren_arg() {
        if (!consume('(')) fail("expected '('");
        const std::size_t start = pos;
        int depth = 1;
        while (pos < text.size() && depth > 0) {
            if (text[pos] == '(') ++depth;
            if (text[pos] == ')') --depth;
            ++pos;
        }
        if (depth != 0) fail("unbalanced parentheses");
        return text.substr(start, pos - start - 1);
    }

    ScalarField parse_atom() {
        const std::string name = parse_name();
        if (name == "normsq") return normsq();
        if (name == "normsq1") return normsq1();
        if (name == "re-q1-conj-q2") return re_q1_conj_q2();
        if (name == "abs") return abs_norm();
        if (name == "gaussian") {
            double scale = 1.0;
            if (peek('(')) {
                const std::string arg = parse_paren_arg();
                try {
                    scale = std::stod(arg);
                } catch (const std::exception&) {
                    fail("gaussian scale '" + arg + "' is not a number");
                }
            }
            return gaussian(scale);
        }
        if (name == "quadform") {
            const std::string path = parse_paren_arg();
            std::ifstream in(path);
            if (!in) fail("cannot open quadform matrix file '" + path + "'");
            nlohmann::json j;
            try {
                in >> j;
            } catch (const std::exception& e) {
                fail(std::string("bad JSON in quadform file: ") + e.what());
            }
            if (!j.is_array() || j.size() != 16) fail("quadform expects a 16x16 array");
            Mat16 m;
            for (int r = 0; r < 16; ++r) {
                if (!j[std::size_t(r)].is_array() || j[std::size_t(r)].size() != 16)
                    fail("quadform expects a 16x16 array");
                for (int c = 0; c < 16; ++c) m(r, c) = j[std::size_t(r)][std::size_t(c)].get<double>();
            }
            return quadform(0.5 * (m + m.transpose()));
        }
        fail("unknown field '" + name + "'");
    }
};

} // namespace

ScalarField parse(const std::string& spec) {
    Parser p(spec);
    ScalarField f = p.parse_expr();
    p.skip_ws();
    if (p.pos != spec.size()) p.fail("trailing input");
    return f;
}

} // namespace fields
} // namespace octoval
