package org.juliet;

import java.security.MessageDigest;

class Archive {
    MessageDigest entry() throws Exception {
        return MessageDigest.getInstance(Digests.LEGACY); //@ kind=DigestFactory value=SHA via=dataflow label=QuantumVulnerable
    }
}
