#pragma once

#include "knz/affine_module.hpp"
#include "knz/algebra.hpp"
#include "knz/basis.hpp"
#include "knz/coefficients.hpp"
#include "knz/config.hpp"
#include "knz/curve.hpp"
#include "knz/elliptic.hpp"
#include "knz/error.hpp"
#include "knz/laurent.hpp"
#include "knz/lie_algebra.hpp"
#include "knz/quadrature.hpp"
#include "knz/section.hpp"
#include "knz/serialize.hpp"
#include "knz/sugawara_kz.hpp"
#include "knz/verify.hpp"
