#pragma once

// Reference 4 x 4 fixture: A is H-selfadjoint with one pair of 2 x 2
// Jordan blocks at -2i and 2i.

#include "indefcanon/structure.hpp"

namespace fixtures {

using indefcanon::CMatrix;
using indefcanon::Complex;
using indefcanon::RMatrix;

inline const Complex I{0.0, 1.0};

inline indefcanon::JordanSpec spec() { return {{indefcanon::BlockSpec::pair({0.0, -2.0}, 2)}}; }

inline RMatrix A() {
  RMatrix a(4, 4);
  a << 0, 0, 0, -16,
       1, 0, 0, 0,
       0, 1, 0, -8,
       0, 0, 1, 0;
  return a;
}

inline RMatrix H() {
  RMatrix h(4, 4);
  h << 0, 1, 0, -12,
       1, 0, -12, 0,
       0, -12, 0, 80,
       -12, 0, 80, 0;
  return h / 128.0;
}

// Affiliates (A, H) to (J, P) but is not conjugate symmetric.
inline CMatrix T() {
  CMatrix t(4, 4);
  t << 8.0 * I, 4, -8.0 * I, 12,
       -4, 4.0 * I, -4, -8.0 * I,
       2.0 * I, -1, -2.0 * I, 1,
       -1, 0, -1, -I;
  return t;
}

// 1-CS Jordan basis that is not flipped orthogonal.
inline CMatrix L() {
  CMatrix l(4, 4);
  l << 8.0 * I, 4, -8.0 * I, 4,
       -4, 4.0 * I, -4, -4.0 * I,
       2.0 * I, -1, -2.0 * I, -1,
       -1, 0, -1, 0;
  return l;
}

// Gram matrix L* H L.
inline CMatrix G() {
  CMatrix g(4, 4);
  g << 0, 0, 0, 1,
       0, 0, 1, -I,
       0, 1, 0, 0,
       1, I, 0, 0;
  return g;
}

// 1-FOCS basis.
inline CMatrix M() {
  CMatrix m(4, 4);
  m << 16.0 * I, 16, -16.0 * I, 16,
       -8, 12.0 * I, -8, -12.0 * I,
       4.0 * I, 0, -4.0 * I, 0,
       -2, I, -2, -I;
  return 0.5 * m;
}

// Real canonical basis.
inline RMatrix R() {
  RMatrix r(4, 4);
  r << -8, 8, 8, 8,
       -4, -4, -6, 6,
       -2, 2, 0, 0,
       -1, -1, -0.5, 0.5;
  return r;
}

inline RMatrix JR() {
  RMatrix j(4, 4);
  j << 0, -2, 1, 0,
       2, 0, 0, 1,
       0, 0, 0, -2,
       0, 0, 2, 0;
  return j;
}

}  // namespace fixtures
