#pragma once

#include "nilhodge/cohomology.hpp"

namespace nh {

struct MinimalRepresentative {
  Flavor flavor;        // Aeppli(p,q)
  VecC coords;          // coordinates of the class
  Form chi;             // Aeppli-harmonic representative
  Form chi_min;         // d-closed, chi_min - chi = del phi_min + delbar psi_min
  Form phi_min, psi_min;
  double closed_residual = 0;
};

// chi_min for an Aeppli class: harmonic part plus minimal-norm correctors
// solving del delbar phi = delbar chi and del delbar psi = -del chi.
MinimalRepresentative minimal_d_closed_rep(const HermitianMetric& g, const CohomologyClass& cls);

// Same correctors applied to a itself (a pure del delbar-closed form) instead of the
// harmonic representative; returns a when a is already d-closed.
MinimalRepresentative d_closed_correction(const HermitianMetric& g, const Form& a);

enum class ClosedRepKind { AeppliToD, DhToD, HAeppliToDh };

// Representative of cls closed for the target differential; the class
// difference is checked to lie in the source flavor's coboundary space.
Form closed_rep(const InvariantModel& m, const CohomologyClass& cls, ClosedRepKind kind);

}  // namespace nh
