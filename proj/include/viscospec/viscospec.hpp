#pragma once

#include "viscospec/diagnostics.hpp"
#include "viscospec/dynamics.hpp"
#include "viscospec/fft.hpp"
#include "viscospec/field.hpp"
#include "viscospec/grid.hpp"
#include "viscospec/integrator.hpp"
#include "viscospec/ledger.hpp"
#include "viscospec/neumann_basis.hpp"
#include "viscospec/operators.hpp"
#include "viscospec/quadrature.hpp"
#include "viscospec/relative_energy.hpp"
#include "viscospec/scenario.hpp"
#include "viscospec/snapshot.hpp"
