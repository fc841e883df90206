#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ssd {

// Sparse binary parity-check matrix, check-major and variable-major adjacency
// kept in sync. Variables are 0-based internally; the alist file format is
// 1-indexed.
struct ParityCheckMatrix {
    int n = 0;  // variables (code length)
    int m = 0;  // checks
    std::vector<std::vector<int>> check_vars;  // per check, ascending variable indices
    std::vector<std::vector<int>> var_checks;  // per variable, ascending check indices
    // The last m columns form the dual-diagonal structure that allows
    // encoding by back-substitution.
    bool staircase = false;

    int info_bits() const { return n - m; }
    double rate() const { return n > 0 ? static_cast<double>(n - m) / n : 0.0; }
    std::size_t edge_count() const;
};

struct AlistParseError : std::runtime_error {
    int line;
    AlistParseError(const std::string& what, int line_no)
        : std::runtime_error("alist parse error at line " + std::to_string(line_no) + ": " + what),
          line(line_no) {}
};

struct UnsupportedMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parses the alist format: line 1 "n m", line 2 "dv_max dc_max", then n
// variable degrees, m check degrees, n variable adjacency lines and m check
// adjacency lines, 1-indexed and space separated. Zero padding entries (as
// written by some tools) are accepted and ignored.
ParityCheckMatrix parse_alist(std::string_view text);
ParityCheckMatrix load_alist_file(const std::string& path);

// Serializes in the same format (unpadded adjacency rows). parse_alist is an
// exact inverse.
std::string to_alist(const ParityCheckMatrix&);

// Systematic encoding by back-substitution over the dual-diagonal parity
// part: codeword = [info | parity]. Throws UnsupportedMatrixError when the
// matrix lacks the staircase structure.
std::vector<std::uint8_t> encode(const ParityCheckMatrix&, std::span<const std::uint8_t> info);

bool syndrome_ok(const ParityCheckMatrix&, std::span<const std::uint8_t> codeword);

struct DecoderConfig {
    int max_iters = 25;
    bool early_stop = true;      // stop on a zero syndrome with all bits decided
    double normalization = 1.0;  // 1.0 = plain min-sum
};

struct DecodeResult {
    std::vector<std::uint8_t> bits;
    bool converged = false;
    int iterations = 0;
};

// Flooding min-sum with the LLR > 0 <=> bit 0 convention shared with the
// demappers. Reusable across frames; buffers are allocated once.
class MinSumDecoder {
  public:
    explicit MinSumDecoder(const ParityCheckMatrix&);
    DecodeResult decode(std::span<const double> llr_in, const DecoderConfig& = {});

  private:
    const ParityCheckMatrix& h_;
    std::vector<int> edge_var_;      // CSR over checks
    std::vector<std::size_t> row_;   // row offsets, size m+1
    std::vector<double> msg_;        // check-to-variable messages
    std::vector<double> total_;      // per-variable aggregated LLR
    std::vector<std::uint8_t> hard_;
    bool decided_ok(std::span<const double> totals) const;
};

DecodeResult minsum_decode(const ParityCheckMatrix&, std::span<const double> llr_in,
                           const DecoderConfig& = {});

}  // namespace ssd
