#pragma once

#include "pqlap/mesh.hpp"
#include "pqlap/params.hpp"
#include "pqlap/boundary_law.hpp"
#include "pqlap/forms.hpp"
#include "pqlap/solver.hpp"
#include "pqlap/io.hpp"
#include "pqlap/theorems.hpp"
#include "pqlap/control.hpp"
