#include "tubalg/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace tubalg {

namespace {

constexpr char kMagic[4] = {'T', 'B', 'T', '1'};

[[noreturn]] void bad_file(const std::string& path, std::uint64_t offset, const std::string& what) {
    throw IoError(path + ": malformed file at byte offset " + std::to_string(offset) + ": " + what);
}

std::uint64_t read_u64(std::istream& in, const std::string& path, std::uint64_t& offset,
                       const std::string& field) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    if (in.gcount() != 8) bad_file(path, offset, "truncated " + field);
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | buf[b];
    offset += 8;
    return v;
}

double read_f64(std::istream& in, const std::string& path, std::uint64_t& offset,
                const std::string& field) {
    const std::uint64_t bits = read_u64(in, path, offset, field);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>((v >> (8 * b)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), 8);
}

void write_f64(std::ostream& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    write_u64(out, bits);
}

}  // namespace

Tensor3 read_tbt1(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open for reading");
    std::uint64_t offset = 0;

    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4) bad_file(path, 0, "truncated magic");
    if (std::memcmp(magic, kMagic, 4) != 0) bad_file(path, 0, "bad magic, expected TBT1");
    offset = 4;

    const std::uint64_t m = read_u64(in, path, offset, "dim m");
    const std::uint64_t p = read_u64(in, path, offset, "dim p");
    const std::uint64_t n = read_u64(in, path, offset, "dim n");
    if (m > (1u << 24) || p > (1u << 24) || n > (1u << 24))
        bad_file(path, 4, "implausibly large dimension");

    char flag_c;
    in.read(&flag_c, 1);
    if (in.gcount() != 1) bad_file(path, offset, "truncated domain flag");
    const unsigned flag = static_cast<unsigned char>(flag_c);
    if (flag > 1) bad_file(path, offset, "domain flag must be 0 or 1");
    offset += 1;

    const std::uint64_t count = m * p * n;
    std::vector<Complex> values(count);
    for (std::uint64_t t = 0; t < count; ++t) {
        const double re = read_f64(in, path, offset, "value");
        const double im = (flag == 1) ? read_f64(in, path, offset, "value") : 0.0;
        values[t] = Complex(re, im);
    }
    char extra;
    if (in.read(&extra, 1)) bad_file(path, offset, "trailing bytes after values");

    return Tensor3(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p),
                   static_cast<Eigen::Index>(n), std::move(values));
}

void write_tbt1(const std::string& path, const Tensor3& t) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path + ": cannot open for writing");
    out.write(kMagic, 4);
    write_u64(out, static_cast<std::uint64_t>(t.rows()));
    write_u64(out, static_cast<std::uint64_t>(t.cols()));
    write_u64(out, static_cast<std::uint64_t>(t.tubes()));
    const bool real = t.max_imag_abs() == 0.0;
    const char flag = real ? 0 : 1;
    out.write(&flag, 1);
    const Complex* v = t.data();
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        write_f64(out, v[i].real());
        if (!real) write_f64(out, v[i].imag());
    }
    if (!out) throw IoError(path + ": write failed");
}

Eigen::MatrixXcd read_transform_matrix(const std::string& path) {
    {
        std::ifstream probe(path, std::ios::binary);
        if (!probe) throw IoError(path + ": cannot open for reading");
        char magic[4] = {0, 0, 0, 0};
        probe.read(magic, 4);
        if (probe.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0) {
            const Tensor3 t = read_tbt1(path);
            if (t.rows() != t.cols() || t.tubes() != 1)
                throw IoError(path + ": TBT1 transform must have dims n x n x 1");
            Eigen::MatrixXcd m(t.rows(), t.cols());
            for (Eigen::Index j = 0; j < t.cols(); ++j)
                for (Eigen::Index i = 0; i < t.rows(); ++i) m(i, j) = t.at(i, j, 0);
            return m;
        }
    }

    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open for reading");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r,") == std::string::npos) continue;
        std::vector<double> fields;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                const double d = std::stod(cell, &used);
                if (cell.find_first_not_of(" \t\r", used) != std::string::npos)
                    throw std::invalid_argument("junk");
                fields.push_back(d);
            } catch (const std::exception&) {
                throw IoError(path + ": line " + std::to_string(lineno) +
                              ": cannot parse numeric field '" + cell + "'");
            }
        }
        rows.push_back(std::move(fields));
    }
    const std::size_t n = rows.size();
    if (n == 0) throw IoError(path + ": empty transform file");
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        if (rows[r].size() != 2 * n)
            throw IoError(path + ": line " + std::to_string(r + 1) + ": expected " +
                          std::to_string(2 * n) + " fields (re,im interleaved), got " +
                          std::to_string(rows[r].size()));
        for (std::size_t c = 0; c < n; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                Complex(rows[r][2 * c], rows[r][2 * c + 1]);
    }
    return m;
}

void write_transform_csv(const std::string& path, const Eigen::MatrixXcd& m) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError(path + ": cannot open for writing");
    out.precision(17);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << m(r, c).real() << ',' << m(r, c).imag();
        }
        out << '\n';
    }
    if (!out) throw IoError(path + ": write failed");
}

}  // namespace tubalg
