#pragma once

#include "qph/error.hpp"
#include "qph/linalg.hpp"
#include "qph/states.hpp"
#include "qph/functionals.hpp"
#include "qph/gf2.hpp"
#include "qph/persistence.hpp"
#include "qph/summaries.hpp"
#include "qph/document.hpp"
