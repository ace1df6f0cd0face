#pragma once

#include "offshell/error.hpp"
#include "offshell/fivespace.hpp"
#include "offshell/source.hpp"
#include "offshell/fields.hpp"
#include "offshell/greens.hpp"
#include "offshell/quadrature.hpp"
#include "offshell/oracle.hpp"
#include "offshell/dynamics.hpp"
#include "offshell/verify.hpp"
