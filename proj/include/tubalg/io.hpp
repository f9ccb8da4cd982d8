#pragma once

#include <Eigen/Core>
#include <string>

#include "tubalg/tensor3.hpp"

namespace tubalg {

// "TBT1" tensor container. Layout, all little-endian:
//   bytes 0..3   magic "TBT1"
//   bytes 4..27  dims m, p, n as uint64
//   byte  28     value flag: 0 = real float64, 1 = complex (interleaved re,im)
//   byte  29..   values in index order (i fastest, then j, then k)
// Real flag 0 is used when every entry has zero imaginary part.
Tensor3 read_tbt1(const std::string& path);
void write_tbt1(const std::string& path, const Tensor3& t);

// Transform matrix files: CSV with 2n numeric fields per row (re,im
// interleaved), or a TBT1 complex-matrix variant (dims n x n x 1). The reader
// sniffs the magic bytes to pick the format.
Eigen::MatrixXcd read_transform_matrix(const std::string& path);
void write_transform_csv(const std::string& path, const Eigen::MatrixXcd& m);

}  // namespace tubalg
