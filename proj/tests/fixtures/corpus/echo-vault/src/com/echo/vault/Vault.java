package com.echo.vault;

import java.security.SecureRandom;
import java.util.Random;
import javax.crypto.Cipher;
import javax.crypto.KeyGenerator;
import javax.crypto.SecretKey;
import javax.crypto.spec.IvParameterSpec;

public class Vault {
    private static final byte[] FIXED_IV = {0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07, 0x08,
        0x09, 0x0a, 0x0b, 0x0c, 0x0d, 0x0e, 0x0f, 0x10};

    public SecretKey masterKey() throws Exception {
        KeyGenerator kg = KeyGenerator.getInstance("AES"); //@ kind=KeyGeneratorFactory value=AES via=literal bits=256 label=QuantumSafe
        kg.init(256);
        return kg.generateKey();
    }

    public Cipher legacy(SecretKey key) throws Exception {
        Cipher c = Cipher.getInstance("AES/ECB/PKCS5Padding"); //@ kind=CipherFactory value=AES/ECB/PKCS5Padding via=literal flags=EcbMode label=ConditionallySafe
        c.init(Cipher.DECRYPT_MODE, key);
        return c;
    }

    public Cipher sealed(SecretKey key) throws Exception {
        Cipher c = Cipher.getInstance("AES" + "/GCM/NoPadding"); //@ kind=CipherFactory value=AES/GCM/NoPadding via=dataflow label=ConditionallySafe
        c.init(Cipher.ENCRYPT_MODE, key, new IvParameterSpec(FIXED_IV)); //@ kind=IvConstruction value=? flags=StaticIv
        return c;
    }

    public IvParameterSpec freshIv() {
        byte[] iv = new byte[16];
        new SecureRandom().nextBytes(iv);
        return new IvParameterSpec(iv); //@ kind=IvConstruction value=?
    }

    public Random jitter() {
        return new Random(42L); //@ kind=RandomConstruction value=? flags=SeededInsecureRandom
    }

    public SecureRandom seeded() {
        return new SecureRandom(new byte[] {7, 7, 7, 7}); //@ kind=RandomConstruction value=? flags=SeededInsecureRandom
    }

    public Random unseeded() {
        return new Random();
    }
}
