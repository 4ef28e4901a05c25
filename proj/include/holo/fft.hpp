#pragma once

#include "holo/field.hpp"

namespace holo {

// Unitary 2D DFT (1/sqrt(N) in both directions) over row-major grids.
// Backed by FFTW with FFTW_ESTIMATE plans so results are bitwise
// reproducible from run to run.

void fft2_inplace(std::span<Complex> data, Shape shape);
void ifft2_inplace(std::span<Complex> data, Shape shape);

ComplexField fft2(const ComplexField& field);
ComplexField ifft2(const ComplexField& field);

}  // namespace holo
