#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragwb/error.hpp"

namespace ragwb::npy {

enum class NpyErrorCode {
    BadMagic,
    UnsupportedVersion,
    UnsupportedDescr,
    FortranOrder,
    Truncated,
    MalformedHeader,
    TrailingBytes,
};

std::string_view to_string(NpyErrorCode code);

class NpyError : public Error {
public:
    NpyError(NpyErrorCode code, const std::string& detail)
        : Error(ErrorKind::Parse, "npy " + std::string(to_string(code)) + ": " + detail), code_(code) {}

    NpyErrorCode code() const noexcept { return code_; }

private:
    NpyErrorCode code_;
};

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Format version 1.0, descr '<f8', C order, 2-D shapes only.
inline constexpr std::size_t kAlignment = 64;

/// The preamble: magic, version 1.0, little-endian u16 header length, then
/// `{'descr': '<f8', 'fortran_order': False, 'shape': (R, C), }` padded with
/// spaces and a final newline to a multiple of 64 bytes.
std::string preamble(std::size_t rows, std::size_t cols);

/// Throws ValidationError for non-finite values.
std::string encode(const Matrix& m);
Matrix decode(std::string_view bytes);

struct Header {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t data_offset = 0;
};

/// Parses and validates the preamble at the start of `bytes`.
Header parse_header(std::string_view bytes);

void write_file(const std::filesystem::path& path, const Matrix& m);
Matrix read_file(const std::filesystem::path& path);

/// Streams a rows x cols matrix to disk one row at a time.
class RowWriter {
public:
    RowWriter(const std::filesystem::path& path, std::size_t rows, std::size_t cols);
    void write_row(std::span<const double> row);
    /// Throws IoError unless exactly `rows` rows were written.
    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t rows_;
    std::size_t cols_;
    std::size_t written_ = 0;
    std::string buffer_;
};

/// Reads a matrix file row by row without materializing it.
class RowReader {
public:
    explicit RowReader(const std::filesystem::path& path);
    const Header& header() const { return header_; }
    /// Fills `row` (resized to cols). Returns false after the last row.
    bool next_row(std::vector<double>& row);

private:
    std::filesystem::path path_;
    std::ifstream in_;
    Header header_;
    std::size_t read_ = 0;
    std::string buffer_;
};

}  // namespace ragwb::npy
