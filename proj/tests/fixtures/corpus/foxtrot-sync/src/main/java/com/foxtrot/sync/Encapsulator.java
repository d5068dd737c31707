package com.foxtrot.sync;

import java.security.SecureRandom;

class Encapsulator {
    Object generator(SecureRandom random) {
        return new org.bouncycastle.pqc.crypto.crystals.kyber.KyberKEMGenerator(random); //@ kind=PqcLibraryReference key=KYBER label=QuantumSafe
    }
}
