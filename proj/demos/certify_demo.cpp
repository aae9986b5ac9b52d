// Sample one matrix from each model, decide singularity, and re-check the certificate.

#include <cstdio>

#include "spsing/certify.hpp"
#include "spsing/io.hpp"
#include "spsing/models.hpp"

using namespace spsing;

int main() {
    const std::size_t n = 12;
    const Model models[] = {BernoulliModel{Rational(1, 10)}, CombinatorialModel{2}, CombinatorialModel{6}};
    for (const auto& model : models) {
        const BitMatrix m = sample(model, n, 2024);
        const auto cert = is_singular_exact(m);
        std::printf("%s\n", matrix_to_text(m).c_str());
        std::printf("%s\n", certificate_to_json(cert).dump().c_str());
        std::printf("independent check: %s\n\n", verify_certificate(m, cert) ? "ok" : "FAILED");
    }
}
