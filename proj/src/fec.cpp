#include "ssd/fec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ssd/errors.hpp"

namespace ssd {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::size_t ParityCheckMatrix::edge_count() const {
    std::size_t e = 0;
    for (const auto& row : check_vars) e += row.size();
    return e;
}

namespace {

// Token reader that tracks line numbers for error reporting.
class TokenReader {
  public:
    explicit TokenReader(std::string_view text) : text_(text) {}

    int read_int(const char* what) {
        skip_space();
        if (pos_ >= text_.size()) throw AlistParseError(std::string("expected ") + what, line_);
        bool neg = false;
        if (text_[pos_] == '-') {
            neg = true;
            ++pos_;
        }
        if (pos_ >= text_.size() || !is_digit(text_[pos_]))
            throw AlistParseError(std::string("expected integer for ") + what, line_);
        long v = 0;
        while (pos_ < text_.size() && is_digit(text_[pos_])) {
            v = v * 10 + (text_[pos_] - '0');
            if (v > 1'000'000'000L) throw AlistParseError("integer too large", line_);
            ++pos_;
        }
        return static_cast<int>(neg ? -v : v);
    }

    bool at_end() {
        skip_space();
        return pos_ >= text_.size();
    }

    int line() const { return line_; }

  private:
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }

    void skip_space() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

bool detect_staircase(const ParityCheckMatrix& h) {
    const int k = h.n - h.m;
    if (k < 0) return false;
    for (int i = 0; i < h.m; ++i) {
        const auto& checks = h.var_checks[static_cast<std::size_t>(k + i)];
        if (i == h.m - 1) {
            if (checks != std::vector<int>{i}) return false;
        } else {
            if (checks != std::vector<int>{i, i + 1}) return false;
        }
    }
    return true;
}

void finalize(ParityCheckMatrix& h) {
    for (auto& row : h.check_vars) std::sort(row.begin(), row.end());
    for (auto& col : h.var_checks) std::sort(col.begin(), col.end());
    h.staircase = detect_staircase(h);
}

}  // namespace

ParityCheckMatrix parse_alist(std::string_view text) {
    TokenReader in(text);
    ParityCheckMatrix h;
    h.n = in.read_int("variable count");
    h.m = in.read_int("check count");
    if (h.n <= 0 || h.m <= 0 || h.m > h.n)
        throw AlistParseError("invalid dimensions", in.line());
    const int dv_max = in.read_int("max variable degree");
    const int dc_max = in.read_int("max check degree");
    if (dv_max <= 0 || dc_max <= 0) throw AlistParseError("invalid max degrees", in.line());

    std::vector<int> var_deg(static_cast<std::size_t>(h.n));
    std::vector<int> chk_deg(static_cast<std::size_t>(h.m));
    for (auto& d : var_deg) {
        d = in.read_int("variable degree");
        if (d < 1 || d > dv_max) throw AlistParseError("variable degree out of range", in.line());
    }
    for (auto& d : chk_deg) {
        d = in.read_int("check degree");
        if (d < 1 || d > dc_max) throw AlistParseError("check degree out of range", in.line());
    }

    h.var_checks.assign(static_cast<std::size_t>(h.n), {});
    h.check_vars.assign(static_cast<std::size_t>(h.m), {});

    // variable adjacency: degree entries plus optional zero padding up to dv_max
    for (int v = 0; v < h.n; ++v) {
        auto& col = h.var_checks[static_cast<std::size_t>(v)];
        col.reserve(static_cast<std::size_t>(var_deg[static_cast<std::size_t>(v)]));
        for (int j = 0; j < var_deg[static_cast<std::size_t>(v)]; ++j) {
            const int c = in.read_int("variable adjacency entry");
            if (c < 1 || c > h.m)
                throw AlistParseError("check index out of range (alist is 1-indexed)", in.line());
            col.push_back(c - 1);
        }
    }
    // check adjacency; this side defines the edges
    for (int c = 0; c < h.m; ++c) {
        auto& row = h.check_vars[static_cast<std::size_t>(c)];
        row.reserve(static_cast<std::size_t>(chk_deg[static_cast<std::size_t>(c)]));
        for (int j = 0; j < chk_deg[static_cast<std::size_t>(c)]; ++j) {
            const int v = in.read_int("check adjacency entry");
            if (v < 1 || v > h.n)
                throw AlistParseError("variable index out of range (alist is 1-indexed)", in.line());
            row.push_back(v - 1);
        }
        std::vector<int> sorted = row;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw AlistParseError("duplicate edge in check row", in.line());
    }

    // cross-validate the two adjacency views
    std::vector<std::vector<int>> from_rows(static_cast<std::size_t>(h.n));
    for (int c = 0; c < h.m; ++c)
        for (int v : h.check_vars[static_cast<std::size_t>(c)])
            from_rows[static_cast<std::size_t>(v)].push_back(c);
    for (int v = 0; v < h.n; ++v) {
        auto a = from_rows[static_cast<std::size_t>(v)];
        auto b = h.var_checks[static_cast<std::size_t>(v)];
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b) throw AlistParseError("variable and check adjacency disagree", in.line());
        if (a.empty()) throw AlistParseError("unconnected variable", in.line());
    }

    finalize(h);
    return h;
}

ParityCheckMatrix load_alist_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open alist file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_alist(ss.str());
}

std::string to_alist(const ParityCheckMatrix& h) {
    std::size_t dv = 0, dc = 0;
    for (const auto& col : h.var_checks) dv = std::max(dv, col.size());
    for (const auto& row : h.check_vars) dc = std::max(dc, row.size());
    std::ostringstream out;
    out << h.n << ' ' << h.m << '\n' << dv << ' ' << dc << '\n';
    for (int v = 0; v < h.n; ++v) {
        out << h.var_checks[static_cast<std::size_t>(v)].size();
        out << (v + 1 < h.n ? ' ' : '\n');
    }
    for (int c = 0; c < h.m; ++c) {
        out << h.check_vars[static_cast<std::size_t>(c)].size();
        out << (c + 1 < h.m ? ' ' : '\n');
    }
    for (const auto& col : h.var_checks) {
        for (std::size_t j = 0; j < col.size(); ++j)
            out << (col[j] + 1) << (j + 1 < col.size() ? ' ' : '\n');
    }
    for (const auto& row : h.check_vars) {
        for (std::size_t j = 0; j < row.size(); ++j)
            out << (row[j] + 1) << (j + 1 < row.size() ? ' ' : '\n');
    }
    return out.str();
}

std::vector<std::uint8_t> encode(const ParityCheckMatrix& h, std::span<const std::uint8_t> info) {
    if (!h.staircase)
        throw UnsupportedMatrixError("encode: matrix lacks the dual-diagonal parity structure");
    const int k = h.info_bits();
    if (static_cast<int>(info.size()) != k)
        throw std::invalid_argument("encode: expected " + std::to_string(k) + " info bits");

    std::vector<std::uint8_t> code(static_cast<std::size_t>(h.n), 0);
    std::copy(info.begin(), info.end(), code.begin());

    // p_0 = A_0 u ; p_i = p_{i-1} + A_i u
    std::uint8_t prev = 0;
    for (int i = 0; i < h.m; ++i) {
        std::uint8_t acc = (i > 0) ? prev : static_cast<std::uint8_t>(0);
        for (int v : h.check_vars[static_cast<std::size_t>(i)])
            if (v < k) acc ^= code[static_cast<std::size_t>(v)] & 1;
        code[static_cast<std::size_t>(k + i)] = acc;
        prev = acc;
    }
    return code;
}

bool syndrome_ok(const ParityCheckMatrix& h, std::span<const std::uint8_t> codeword) {
    if (static_cast<int>(codeword.size()) != h.n)
        throw std::invalid_argument("syndrome_ok: wrong codeword length");
    for (const auto& row : h.check_vars) {
        std::uint8_t acc = 0;
        for (int v : row) acc ^= codeword[static_cast<std::size_t>(v)] & 1;
        if (acc) return false;
    }
    return true;
}

MinSumDecoder::MinSumDecoder(const ParityCheckMatrix& h) : h_(h) {
    row_.reserve(static_cast<std::size_t>(h.m) + 1);
    row_.push_back(0);
    for (const auto& row : h.check_vars) {
        for (int v : row) edge_var_.push_back(v);
        row_.push_back(edge_var_.size());
    }
    msg_.resize(edge_var_.size());
    total_.resize(static_cast<std::size_t>(h.n));
    hard_.resize(static_cast<std::size_t>(h.n));
}

bool MinSumDecoder::decided_ok(std::span<const double> totals) const {
    // A zero total is an undecided bit; convergence requires a zero syndrome
    // over decided bits only.
    for (int v = 0; v < h_.n; ++v)
        if (totals[static_cast<std::size_t>(v)] == 0.0) return false;
    return true;
}

DecodeResult MinSumDecoder::decode(std::span<const double> llr_in, const DecoderConfig& cfg) {
    if (static_cast<int>(llr_in.size()) != h_.n)
        throw std::invalid_argument("minsum_decode: LLR length mismatch");
    if (cfg.max_iters < 1) throw std::invalid_argument("minsum_decode: max_iters must be >= 1");

    std::fill(msg_.begin(), msg_.end(), 0.0);
    std::copy(llr_in.begin(), llr_in.end(), total_.begin());

    const auto harden = [&] {
        for (int v = 0; v < h_.n; ++v)
            hard_[static_cast<std::size_t>(v)] = total_[static_cast<std::size_t>(v)] < 0.0 ? 1 : 0;
    };

    DecodeResult res;
    harden();
    if (cfg.early_stop && decided_ok(total_) && syndrome_ok(h_, hard_)) {
        res.bits = hard_;
        res.converged = true;
        res.iterations = 0;
        return res;
    }

    for (int it = 1; it <= cfg.max_iters; ++it) {
        // check pass: totals are from the previous iteration throughout
        for (int c = 0; c < h_.m; ++c) {
            const std::size_t lo = row_[static_cast<std::size_t>(c)];
            const std::size_t hi = row_[static_cast<std::size_t>(c) + 1];
            double min1 = kInf, min2 = kInf;
            std::size_t arg1 = lo;
            int sign = 1;
            for (std::size_t e = lo; e < hi; ++e) {
                const double q = total_[static_cast<std::size_t>(edge_var_[e])] - msg_[e];
                const double mag = std::fabs(q);
                if (q < 0.0) sign = -sign;
                // stash q's sign in msg_ for the second sweep
                msg_[e] = q;
                if (mag < min1) {
                    min2 = min1;
                    min1 = mag;
                    arg1 = e;
                } else if (mag < min2) {
                    min2 = mag;
                }
            }
            for (std::size_t e = lo; e < hi; ++e) {
                const double q = msg_[e];
                const int s = ((q < 0.0) ? -1 : 1) * sign;
                const double mag = (e == arg1) ? min2 : min1;
                msg_[e] = cfg.normalization * static_cast<double>(s) * mag;
            }
        }
        // variable pass
        std::copy(llr_in.begin(), llr_in.end(), total_.begin());
        for (int c = 0; c < h_.m; ++c) {
            const std::size_t lo = row_[static_cast<std::size_t>(c)];
            const std::size_t hi = row_[static_cast<std::size_t>(c) + 1];
            for (std::size_t e = lo; e < hi; ++e)
                total_[static_cast<std::size_t>(edge_var_[e])] += msg_[e];
        }

        res.iterations = it;
        harden();
        if (cfg.early_stop && decided_ok(total_) && syndrome_ok(h_, hard_)) {
            res.bits = hard_;
            res.converged = true;
            return res;
        }
    }
    res.bits = hard_;
    res.converged = false;
    res.iterations = cfg.max_iters;
    return res;
}

DecodeResult minsum_decode(const ParityCheckMatrix& h, std::span<const double> llr_in,
                           const DecoderConfig& cfg) {
    MinSumDecoder dec(h);
    return dec.decode(llr_in, cfg);
}

}  // namespace ssd
