#pragma once

// Scale-function expression language.
//
//   expr := product {"+" product}
//   product := term {"*" term}
//   term := atom ["^" signed-number]
//   atom := number | "r" | "loginv(r)" | "log(r)" | "loglog(r)" | "logloginv(r)"
//         | "exp(" signed-number "*loglog(r)^" signed-number ")"
//         | "piecewise(" number ";" expr ";" expr ")"
//
// "loginv(r)" is |log r|, "logloginv(r)" is log|log r| (also accepted under the
// spelling "loglog(1/r)"). Whitespace is ignored. Numbers are decimal
// literals; printing uses the shortest representation that round-trips the
// double, so parse(print(e)) == e.
//
// Every expression evaluates to a positive value on its valid set; evaluation
// is done in log space (log f as a function of log r) so scales like
// r = exp(-1e20) stay representable.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "lillab/errors.hpp"
#include "lillab/math_util.hpp"

namespace lillab {

enum class ExprKind {
    Number,        // value = c > 0
    Var,           // r
    LogInv,        // |log r|
    Log,           // log r
    LogLog,        // log log r
    LogLogInv,     // log |log r|
    ExpLogLogPow,  // exp(value * (log log r)^value2)
    Power,         // kids[0] ^ value
    Product,       // kids[0] * kids[1] * ...
    Sum,           // kids[0] + kids[1] + ...
    Piecewise,     // kids[0] on r < value, kids[1] (rescaled for continuity) on r >= value
};

struct ScaleExpr {
    ExprKind kind = ExprKind::Var;
    double value = 0.0;
    double value2 = 0.0;
    std::vector<ScaleExpr> kids;

    bool operator==(const ScaleExpr&) const = default;
};

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// printing

inline std::string print_expr(const ScaleExpr& e) {
    switch (e.kind) {
        case ExprKind::Number: return format_double(e.value);
        case ExprKind::Var: return "r";
        case ExprKind::LogInv: return "loginv(r)";
        case ExprKind::Log: return "log(r)";
        case ExprKind::LogLog: return "loglog(r)";
        case ExprKind::LogLogInv: return "logloginv(r)";
        case ExprKind::ExpLogLogPow:
            return "exp(" + format_double(e.value) + "*loglog(r)^" + format_double(e.value2) + ")";
        case ExprKind::Power: return print_expr(e.kids[0]) + "^" + format_double(e.value);
        case ExprKind::Product: {
            std::string s;
            for (std::size_t i = 0; i < e.kids.size(); ++i) {
                if (i) s += "*";
                s += print_expr(e.kids[i]);
            }
            return s;
        }
        case ExprKind::Sum: {
            std::string s;
            for (std::size_t i = 0; i < e.kids.size(); ++i) {
                if (i) s += "+";
                s += print_expr(e.kids[i]);
            }
            return s;
        }
        case ExprKind::Piecewise:
            return "piecewise(" + format_double(e.value) + ";" + print_expr(e.kids[0]) + ";" +
                   print_expr(e.kids[1]) + ")";
    }
    throw Error("print_expr: bad node");
}

// ---------------------------------------------------------------------------
// evaluation (log space): returns log f(r) given x = log r

inline double log_eval_expr(const ScaleExpr& e, double x) {
    switch (e.kind) {
        case ExprKind::Number: return std::log(e.value);
        case ExprKind::Var: return x;
        case ExprKind::LogInv:
            if (x == 0.0) throw DomainError("loginv(r) undefined at r = 1");
            return std::log(std::abs(x));
        case ExprKind::Log:
            if (x <= 0.0) throw DomainError("log(r) atom requires r > 1");
            return std::log(x);
        case ExprKind::LogLog:
            if (x <= 1.0) throw DomainError("loglog(r) atom requires r > e");
            return std::log(std::log(x));
        case ExprKind::LogLogInv:
            if (std::abs(x) <= 1.0)
                throw DomainError("logloginv(r) atom requires r < 1/e or r > e");
            return std::log(std::log(std::abs(x)));
        case ExprKind::ExpLogLogPow:
            if (x <= 1.0) throw DomainError("exp(k*loglog(r)^q) atom requires r > e");
            return e.value * std::pow(std::log(x), e.value2);
        case ExprKind::Power: return e.value * log_eval_expr(e.kids[0], x);
        case ExprKind::Product: {
            double s = 0.0;
            for (const auto& k : e.kids) s += log_eval_expr(k, x);
            return s;
        }
        case ExprKind::Sum: {
            double s = kNegInf;
            for (const auto& k : e.kids) s = log_add(s, log_eval_expr(k, x));
            return s;
        }
        case ExprKind::Piecewise: {
            double xb = std::log(e.value);
            if (x < xb) return log_eval_expr(e.kids[0], x);
            // glue: rescale the outer piece to meet the inner one at the breakpoint
            double scale = log_eval_expr(e.kids[0], xb) - log_eval_expr(e.kids[1], xb);
            return log_eval_expr(e.kids[1], x) + scale;
        }
    }
    throw Error("log_eval_expr: bad node");
}

inline double eval_expr(const ScaleExpr& e, double r) {
    if (!(r > 0.0)) throw DomainError("expression argument must be positive");
    return std::exp(log_eval_expr(e, std::log(r)));
}

// ---------------------------------------------------------------------------
// parsing

namespace detail {

class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    ScaleExpr parse() {
        ScaleExpr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError("trailing input after expression", pos_);
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!eat(c)) throw ParseError(std::string("expected '") + c + "' " + what, pos_);
    }

    bool eat_word(std::string_view w) {
        skip_ws();
        if (text_.substr(pos_, w.size()) == w) {
            pos_ += w.size();
            return true;
        }
        return false;
    }

    double parse_number(bool allow_sign) {
        skip_ws();
        std::size_t start = pos_;
        if (allow_sign && pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
        if (pos_ >= text_.size() || !(std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                      text_[pos_] == '.'))
            throw ParseError("expected a number", start);
        const char* begin = text_.data() + start;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("malformed number", start);
        pos_ = start + static_cast<std::size_t>(end - begin);
        if (!std::isfinite(v)) throw ParseError("number out of range", start);
        return v;
    }

    ScaleExpr parse_sum() {
        ScaleExpr first = parse_product();
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != '+') return first;
        ScaleExpr sum{ExprKind::Sum};
        sum.kids.push_back(std::move(first));
        while (eat('+')) sum.kids.push_back(parse_product());
        return sum;
    }

    ScaleExpr parse_product() {
        ScaleExpr first = parse_term();
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != '*') return first;
        ScaleExpr prod{ExprKind::Product};
        prod.kids.push_back(std::move(first));
        while (eat('*')) prod.kids.push_back(parse_term());
        return prod;
    }

    ScaleExpr parse_term() {
        ScaleExpr atom = parse_atom();
        if (eat('^')) {
            ScaleExpr pw{ExprKind::Power};
            pw.value = parse_number(/*allow_sign=*/true);
            pw.kids.push_back(std::move(atom));
            return pw;
        }
        return atom;
    }

    ScaleExpr parse_atom() {
        skip_ws();
        std::size_t at = pos_;
        // order matters: longest names first
        if (eat_word("logloginv")) {
            expect('(', "after logloginv");
            if (!eat_word("r")) throw ParseError("expected 'r' in logloginv(r)", pos_);
            expect(')', "closing logloginv");
            return ScaleExpr{ExprKind::LogLogInv};
        }
        if (eat_word("loglog")) {
            expect('(', "after loglog");
            if (eat_word("1")) {  // alias: loglog(1/r) == logloginv(r)
                expect('/', "in loglog(1/r)");
                if (!eat_word("r")) throw ParseError("expected 'r' in loglog(1/r)", pos_);
                expect(')', "closing loglog(1/r)");
                return ScaleExpr{ExprKind::LogLogInv};
            }
            if (!eat_word("r")) throw ParseError("expected 'r' in loglog(r)", pos_);
            expect(')', "closing loglog");
            return ScaleExpr{ExprKind::LogLog};
        }
        if (eat_word("loginv")) {
            expect('(', "after loginv");
            if (!eat_word("r")) throw ParseError("expected 'r' in loginv(r)", pos_);
            expect(')', "closing loginv");
            return ScaleExpr{ExprKind::LogInv};
        }
        if (eat_word("log")) {
            expect('(', "after log");
            if (!eat_word("r")) throw ParseError("expected 'r' in log(r)", pos_);
            expect(')', "closing log");
            return ScaleExpr{ExprKind::Log};
        }
        if (eat_word("exp")) {
            expect('(', "after exp");
            ScaleExpr e{ExprKind::ExpLogLogPow};
            e.value = parse_number(/*allow_sign=*/true);
            expect('*', "in exp(k*loglog(r)^q)");
            if (!eat_word("loglog")) throw ParseError("expected 'loglog' in exp atom", pos_);
            expect('(', "in exp atom");
            if (!eat_word("r")) throw ParseError("expected 'r' in exp atom", pos_);
            expect(')', "in exp atom");
            expect('^', "in exp(k*loglog(r)^q)");
            e.value2 = parse_number(/*allow_sign=*/true);
            expect(')', "closing exp atom");
            return e;
        }
        if (eat_word("piecewise")) {
            expect('(', "after piecewise");
            ScaleExpr e{ExprKind::Piecewise};
            e.value = parse_number(/*allow_sign=*/false);
            if (!(e.value > 0.0)) throw ParseError("piecewise breakpoint must be positive", at);
            expect(';', "after piecewise breakpoint");
            e.kids.push_back(parse_sum());
            expect(';', "between piecewise branches");
            e.kids.push_back(parse_sum());
            expect(')', "closing piecewise");
            return e;
        }
        if (eat_word("r")) return ScaleExpr{ExprKind::Var};
        if (pos_ < text_.size() &&
            (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
            ScaleExpr e{ExprKind::Number};
            e.value = parse_number(/*allow_sign=*/false);
            if (!(e.value > 0.0)) throw ParseError("constants must be positive", at);
            return e;
        }
        throw ParseError("expected an atom", pos_);
    }
};

}  // namespace detail

inline ScaleExpr parse_scale_expr(std::string_view text) {
    return detail::ExprParser(text).parse();
}

}  // namespace lillab
