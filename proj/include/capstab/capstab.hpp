#pragma once

// Umbrella header for the capstab toolkit.

#include "capstab/conformal.hpp"
#include "capstab/delaunay.hpp"
#include "capstab/jacobi_eigen.hpp"
#include "capstab/json_writer.hpp"
#include "capstab/report.hpp"
#include "capstab/stability.hpp"
#include "capstab/surface.hpp"
#include "capstab/vec.hpp"
#include "capstab/verify.hpp"
