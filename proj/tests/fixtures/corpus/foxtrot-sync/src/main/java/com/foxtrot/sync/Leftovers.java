package com.foxtrot.sync;

import java.util.List;
import org.bouncycastle.pqc.crypto.crystals.dilithium.DilithiumSigner; //@ kind=PqcLibraryReference key=DILITHIUM flags=UnusedPqcImport label=QuantumSafe

// DilithiumSigner was planned for release 3.
class Leftovers {
    List<String> names() {
        return List.of("dilithium", "kyber");
    }
}
