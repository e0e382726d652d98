/// Umbrella header for the pgsd library.
#pragma once

#include "pgsd/error.hpp"
#include "pgsd/fcidump.hpp"
#include "pgsd/statevector.hpp"
#include "pgsd/pauli.hpp"
#include "pgsd/hamiltonian.hpp"
#include "pgsd/circuit.hpp"
#include "pgsd/ansatz.hpp"
#include "pgsd/simulator.hpp"
#include "pgsd/noise.hpp"
#include "pgsd/casci.hpp"
#include "pgsd/vqe.hpp"
#include "pgsd/cli.hpp"
