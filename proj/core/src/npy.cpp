#include "ragwb/npy.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <optional>

#include "ragwb/io.hpp"

namespace ragwb::npy {
namespace {

constexpr std::string_view kMagic = "\x93NUMPY";
constexpr std::size_t kFixedPrefix = 10;  // magic(6) + version(2) + header_len(2)

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

void put_f64(char* dst, double value) {
    auto bits = std::bit_cast<std::uint64_t>(value);
    for (int i = 0; i < 8; ++i) {
        dst[i] = static_cast<char>(bits & 0xFF);
        bits >>= 8;
    }
}

double get_f64(const char* src) {
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | static_cast<unsigned char>(src[i]);
    return std::bit_cast<double>(bits);
}

// Minimal reader for the Python dict literal in the header.
class DictParser {
public:
    explicit DictParser(std::string_view text) : s_(text) {}

    Header parse() {
        std::optional<std::string> descr;
        std::optional<bool> fortran;
        std::optional<std::vector<std::size_t>> shape;

        expect('{');
        for (;;) {
            skip_ws();
            if (peek() == '}') break;
            const std::string key = quoted();
            expect(':');
            skip_ws();
            if (key == "descr") {
                descr = quoted();
            } else if (key == "fortran_order") {
                fortran = boolean();
            } else if (key == "shape") {
                shape = tuple();
            } else {
                fail("unexpected key '" + key + "'");
            }
            skip_ws();
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            skip_ws();
            if (peek() != '}') fail("expected ',' or '}'");
        }
        ++pos_;
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
        if (pos_ + 1 != s_.size() || s_[pos_] != '\n') fail("header must end with spaces and a newline");

        if (!descr || !fortran || !shape) fail("header lacks one of descr, fortran_order, shape");
        if (*descr != "<f8") throw NpyError(NpyErrorCode::UnsupportedDescr, "descr '" + *descr + "', only '<f8' is supported");
        if (*fortran) throw NpyError(NpyErrorCode::FortranOrder, "fortran_order True is not supported");
        if (shape->size() != 2) fail("expected a 2-D shape, got " + std::to_string(shape->size()) + " dimensions");
        return Header{(*shape)[0], (*shape)[1], 0};
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw NpyError(NpyErrorCode::MalformedHeader, what + " (header offset " + std::to_string(pos_) + ")");
    }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }
    void expect(char c) {
        skip_ws();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }
    std::string quoted() {
        skip_ws();
        const char q = peek();
        if (q != '\'' && q != '"') fail("expected a quoted string");
        const auto end = s_.find(q, pos_ + 1);
        if (end == std::string_view::npos) fail("unterminated string");
        std::string out(s_.substr(pos_ + 1, end - pos_ - 1));
        pos_ = end + 1;
        return out;
    }
    bool boolean() {
        if (s_.substr(pos_, 4) == "True") {
            pos_ += 4;
            return true;
        }
        if (s_.substr(pos_, 5) == "False") {
            pos_ += 5;
            return false;
        }
        fail("expected True or False");
    }
    std::vector<std::size_t> tuple() {
        expect('(');
        std::vector<std::size_t> dims;
        for (;;) {
            skip_ws();
            if (peek() == ')') break;
            if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected a dimension");
            std::size_t value = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                value = value * 10 + static_cast<std::size_t>(s_[pos_++] - '0');
            }
            dims.push_back(value);
            skip_ws();
            if (peek() == ',') ++pos_;
            else if (peek() != ')') fail("expected ',' or ')' in shape");
        }
        ++pos_;
        return dims;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

std::size_t payload_bytes(const Header& h) { return h.rows * h.cols * sizeof(double); }

}  // namespace

std::string_view to_string(NpyErrorCode code) {
    switch (code) {
        case NpyErrorCode::BadMagic: return "bad-magic";
        case NpyErrorCode::UnsupportedVersion: return "unsupported-version";
        case NpyErrorCode::UnsupportedDescr: return "unsupported-descr";
        case NpyErrorCode::FortranOrder: return "fortran-order";
        case NpyErrorCode::Truncated: return "truncated";
        case NpyErrorCode::MalformedHeader: return "malformed-header";
        case NpyErrorCode::TrailingBytes: return "trailing-bytes";
    }
    return "unknown";
}

std::string preamble(std::size_t rows, std::size_t cols) {
    std::string dict = "{'descr': '<f8', 'fortran_order': False, 'shape': (" + std::to_string(rows) + ", " +
                       std::to_string(cols) + "), }";
    const std::size_t unpadded = kFixedPrefix + dict.size() + 1;
    const std::size_t total = (unpadded + kAlignment - 1) / kAlignment * kAlignment;
    dict.append(total - unpadded, ' ');
    dict.push_back('\n');

    const std::size_t header_len = dict.size();
    if (header_len > 0xFFFF) throw ValidationError("npy header too long for format 1.0");
    std::string out(kMagic);
    out.push_back('\x01');
    out.push_back('\x00');
    out.push_back(static_cast<char>(header_len & 0xFF));
    out.push_back(static_cast<char>(header_len >> 8));
    out += dict;
    return out;
}

Header parse_header(std::string_view bytes) {
    if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
        throw NpyError(NpyErrorCode::BadMagic, "missing \\x93NUMPY magic");
    }
    if (bytes.size() < kFixedPrefix) throw NpyError(NpyErrorCode::Truncated, "preamble shorter than 10 bytes");
    const auto major = static_cast<unsigned char>(bytes[6]);
    const auto minor = static_cast<unsigned char>(bytes[7]);
    if (major != 1 || minor != 0) {
        throw NpyError(NpyErrorCode::UnsupportedVersion,
                       "version " + std::to_string(major) + "." + std::to_string(minor) + ", only 1.0 is supported");
    }
    const std::size_t header_len =
        static_cast<unsigned char>(bytes[8]) | (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
    if (bytes.size() < kFixedPrefix + header_len) {
        throw NpyError(NpyErrorCode::Truncated, "header declares " + std::to_string(header_len) + " bytes");
    }
    Header h = DictParser(bytes.substr(kFixedPrefix, header_len)).parse();
    h.data_offset = kFixedPrefix + header_len;
    return h;
}

std::string encode(const Matrix& m) {
    if (m.data.size() != m.rows * m.cols) throw ValidationError("matrix data size does not match its shape");
    std::string out = preamble(m.rows, m.cols);
    const std::size_t offset = out.size();
    out.resize(offset + m.data.size() * sizeof(double));
    for (std::size_t i = 0; i < m.data.size(); ++i) {
        if (!std::isfinite(m.data[i])) throw ValidationError("npy payload must be finite");
        put_f64(out.data() + offset + i * sizeof(double), m.data[i]);
    }
    return out;
}

Matrix decode(std::string_view bytes) {
    const Header h = parse_header(bytes);
    const std::size_t need = payload_bytes(h);
    const std::size_t have = bytes.size() - h.data_offset;
    if (have < need) {
        throw NpyError(NpyErrorCode::Truncated,
                       "payload has " + std::to_string(have) + " bytes, shape needs " + std::to_string(need));
    }
    if (have > need) throw NpyError(NpyErrorCode::TrailingBytes, std::to_string(have - need) + " bytes after payload");
    Matrix m(h.rows, h.cols);
    for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = get_f64(bytes.data() + h.data_offset + i * sizeof(double));
    return m;
}

void write_file(const std::filesystem::path& path, const Matrix& m) { io::write_file(path, encode(m)); }

Matrix read_file(const std::filesystem::path& path) { return decode(io::read_file(path)); }

RowWriter::RowWriter(const std::filesystem::path& path, std::size_t rows, std::size_t cols)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), rows_(rows), cols_(cols) {
    if (!out_) throw IoError("cannot write " + path.string());
    const auto pre = preamble(rows, cols);
    out_.write(pre.data(), static_cast<std::streamsize>(pre.size()));
    buffer_.resize(cols * sizeof(double));
}

void RowWriter::write_row(std::span<const double> row) {
    if (row.size() != cols_) throw ValidationError("row width does not match the declared column count");
    if (written_ == rows_) throw ValidationError("more rows written than declared");
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (!std::isfinite(row[i])) throw ValidationError("npy payload must be finite");
        put_f64(buffer_.data() + i * sizeof(double), row[i]);
    }
    out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    if (!out_) throw IoError("write failed for " + path_.string());
    ++written_;
}

void RowWriter::close() {
    if (written_ != rows_) {
        throw IoError(path_.string() + ": wrote " + std::to_string(written_) + " of " + std::to_string(rows_) + " rows");
    }
    out_.close();
    if (!out_) throw IoError("close failed for " + path_.string());
}

RowReader::RowReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open " + path.string());
    std::string prefix(kFixedPrefix, '\0');
    in_.read(prefix.data(), static_cast<std::streamsize>(prefix.size()));
    prefix.resize(static_cast<std::size_t>(in_.gcount()));
    // parse_header reports magic/version problems before the length is trusted.
    if (prefix.size() == kFixedPrefix) {
        const std::size_t header_len = static_cast<unsigned char>(prefix[8]) |
                                       (static_cast<std::size_t>(static_cast<unsigned char>(prefix[9])) << 8);
        std::string header(header_len, '\0');
        in_.read(header.data(), static_cast<std::streamsize>(header_len));
        header.resize(static_cast<std::size_t>(in_.gcount()));
        prefix += header;
    }
    header_ = parse_header(prefix);

    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec) throw IoError("cannot stat " + path.string());
    const std::size_t have = static_cast<std::size_t>(size) - header_.data_offset;
    const std::size_t need = payload_bytes(header_);
    if (have < need) {
        throw NpyError(NpyErrorCode::Truncated,
                       path.string() + ": payload has " + std::to_string(have) + " bytes, shape needs " + std::to_string(need));
    }
    if (have > need) throw NpyError(NpyErrorCode::TrailingBytes, path.string() + ": bytes after payload");
    buffer_.resize(header_.cols * sizeof(double));
}

bool RowReader::next_row(std::vector<double>& row) {
    if (read_ == header_.rows) return false;
    in_.read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    if (static_cast<std::size_t>(in_.gcount()) != buffer_.size()) {
        throw NpyError(NpyErrorCode::Truncated, path_.string() + ": short read");
    }
    row.resize(header_.cols);
    for (std::size_t i = 0; i < header_.cols; ++i) row[i] = get_f64(buffer_.data() + i * sizeof(double));
    ++read_;
    return true;
}

}  // namespace ragwb::npy
