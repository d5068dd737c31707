package com.kilo.wallet;

import java.security.KeyPairGenerator;
import java.security.PrivateKey;
import java.security.Signature;
import java.security.spec.ECGenParameterSpec;

public class TxSigner {
    private static final String CURVE = "secp256k1";

    public Signature signer(PrivateKey key) throws Exception {
        Signature s = Signature.getInstance("SHA256withECDSA"); //@ kind=SignatureFactory value=SHA256withECDSA via=literal label=QuantumVulnerable
        s.initSign(key);
        return s;
    }

    public KeyPairGenerator keys() throws Exception {
        KeyPairGenerator kpg = KeyPairGenerator.getInstance("EC"); //@ kind=KeyPairGeneratorFactory value=EC via=literal bits=256 label=QuantumVulnerable
        kpg.initialize(new ECGenParameterSpec(CURVE));
        return kpg;
    }
}
