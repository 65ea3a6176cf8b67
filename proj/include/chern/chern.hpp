#pragma once

#include "chern/expr.hpp"
#include "chern/fields.hpp"
#include "chern/geometry.hpp"
#include "chern/identities.hpp"
#include "chern/linalg.hpp"
#include "chern/manifold.hpp"
#include "chern/report.hpp"
