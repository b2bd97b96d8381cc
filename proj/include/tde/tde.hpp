#pragma once

#include "tde/error.hpp"
#include "tde/register.hpp"
#include "tde/state.hpp"
#include "tde/registers.hpp"
#include "tde/dynamics.hpp"
#include "tde/measures.hpp"
#include "tde/channel.hpp"
#include "tde/scenarios.hpp"
#include "tde/curves.hpp"
#include "tde/json_io.hpp"
#include "tde/circuit.hpp"
