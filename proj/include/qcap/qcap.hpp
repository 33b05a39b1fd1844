#pragma once

// Variational channel-coding laboratory: density-matrix simulation of
// parameterized encoder/decoder circuits over noisy qubit channels, with
// rate evaluation against capacity references.

#include "qcap/channels.hpp"
#include "qcap/circuit.hpp"
#include "qcap/config.hpp"
#include "qcap/matrix.hpp"
#include "qcap/metrics.hpp"
#include "qcap/optim.hpp"
#include "qcap/qmath.hpp"
#include "qcap/runner.hpp"
#include "qcap/tasks.hpp"
