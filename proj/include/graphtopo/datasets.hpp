#pragma once

// Small reference systems used by examples, tests and `graphtopo verify`.

#include "core.hpp"

#include <cmath>

namespace graphtopo::datasets {

// Correlation of the 4-step random-walk chain x_k = x_{k-1} + noise.
inline Matrix chain4_correlation() {
  Matrix r(4, 4);
  r << 1, 1, 1, 1,
       1, 2, 2, 2,
       1, 2, 3, 3,
       1, 2, 3, 4;
  return r;
}

inline Matrix chain4_precision() {
  Matrix c(4, 4);
  c << 2, -1, 0, 0,
       -1, 2, -1, 0,
       0, -1, 2, -1,
       0, 0, -1, 1;
  return c;
}

inline Matrix chain4_normalized_precision() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix c(4, 4);
  c << 1, -0.5, 0, 0,
       -0.5, 1, -0.5, 0,
       0, -0.5, 1, -s,
       0, 0, -s, 1;
  return c;
}

inline Matrix chain4_regression() {
  Matrix b(4, 4);
  b << 0, 0.5, 0, 0,
       0.5, 0, 0.5, 0,
       0, 0.5, 0, 0.5,
       0, 0, 1, 0;
  return b;
}

inline Matrix chain4_weights() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix w(4, 4);
  w << 0, 0.5, 0, 0,
       0.5, 0, 0.5, 0,
       0, 0.5, 0, s,
       0, 0, s, 0;
  return w;
}

// 8-vertex weighted graph shared by the circuit, random-walk and polynomial-fit examples.
inline Graph weighted8() {
  return Graph::from_edges(8, {{0, 1, 0.23}, {0, 2, 0.74}, {0, 3, 0.24}, {1, 2, 0.35}, {1, 4, 0.23}, {2, 3, 0.26},
                               {2, 4, 0.24}, {3, 6, 0.32}, {4, 5, 0.51}, {4, 7, 0.14}, {5, 7, 0.15}, {6, 7, 0.32}});
}

// 8-page hyperlink graph, W(i, j) = 1 when page i links to page j.
inline DirectedGraph web8() {
  Matrix w(8, 8);
  w << 0, 1, 0, 0, 0, 0, 0, 0,
       0, 0, 1, 0, 0, 0, 0, 0,
       1, 0, 0, 1, 1, 0, 0, 1,
       1, 0, 0, 0, 0, 0, 0, 0,
       0, 1, 1, 0, 0, 1, 0, 0,
       0, 0, 0, 0, 0, 0, 0, 1,
       0, 0, 0, 1, 0, 0, 0, 1,
       0, 0, 1, 0, 0, 0, 1, 0;
  return DirectedGraph(w);
}

inline Vector web8_rank() {
  Vector v(8);
  v << 1.33, 1.52, 2.18, 0.79, 0.55, 0.18, 0.48, 0.97;
  return v;
}

// 8-person friendship graph, unit weights.
inline Graph social8() {
  return Graph::from_edges(8, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {1, 2, 1}, {1, 4, 1}, {2, 3, 1}, {2, 4, 1},
                               {3, 6, 1}, {4, 5, 1}, {4, 7, 1}, {5, 7, 1}, {6, 7, 1}});
}

inline Vector social8_absorb() {
  Vector v(8);
  v << 0.375, 0.625, 0.5, 0, 1, 0.875, 0.375, 0.75;
  return v;
}

// hitting times to vertex 3 on weighted8 (entry 3 is the target)
inline Vector weighted8_hitting3() {
  Vector v(8);
  v << 9.0155, 11.3003, 9.5942, 0.0, 12.6594, 13.1427, 6.1930, 10.3860;
  return v;
}

inline Vector weighted8_circuit() {
  Vector v(8);
  v << 6.71, 6.88, 7.13, 5.25, 6.67, 8.18, 2.62, 0.0;
  return v;
}

}  // namespace graphtopo::datasets
