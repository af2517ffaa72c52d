#pragma once

#include "bqrrp/memory.hpp"
#include "bqrrp/errors.hpp"
#include "bqrrp/matrix.hpp"
#include "bqrrp/matrix_io.hpp"
#include "bqrrp/parallel.hpp"
#include "bqrrp/blas.hpp"
#include "bqrrp/sketch.hpp"
#include "bqrrp/pivot_vector.hpp"
#include "bqrrp/pivoting.hpp"
#include "bqrrp/householder.hpp"
#include "bqrrp/factor.hpp"
#include "bqrrp/qrcp_wide.hpp"
#include "bqrrp/qr_tall.hpp"
#include "bqrrp/bqrrp.hpp"
#include "bqrrp/quality.hpp"
